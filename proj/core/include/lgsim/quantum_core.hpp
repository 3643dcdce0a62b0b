// quantum_core.hpp
// Closed-form predictions for a two-level system driven by H = (omega/2) sigma_x
// and measured projectively in the {|1>, |2>} basis.

#pragma once

#include <array>
#include <complex>

namespace lgsim {

using complex = std::complex<double>;

/// Tolerance for analytic identities evaluated in double precision.
inline constexpr double kAnalyticTolerance = 1e-12;

/// Normalized two-component state vector.
class QubitState {
public:
    /// Throws std::invalid_argument unless |a1|^2 + |a2|^2 = 1 within kAnalyticTolerance.
    QubitState(complex amplitude_1, complex amplitude_2);

    /// |1> = (1, 0), the initial state used throughout.
    static QubitState ground() { return {complex{1.0, 0.0}, complex{0.0, 0.0}}; }

    /// Rescales an arbitrary nonzero vector to unit norm, keeping its phase.
    static QubitState normalized(complex amplitude_1, complex amplitude_2);

    complex amplitude_1() const { return amp_[0]; }
    complex amplitude_2() const { return amp_[1]; }
    const std::array<complex, 2>& amplitudes() const { return amp_; }

    double norm() const;

private:
    std::array<complex, 2> amp_;
};

/// Rabi frequency omega > 0; all times are read in units where omega*t is an angle.
class RabiFrequency {
public:
    explicit RabiFrequency(double omega);
    double value() const { return omega_; }

private:
    double omega_;
};

/// Projective outcome: state 1 (Q = +1) or state 2 (Q = -1).
enum class Outcome : int { state1 = 1, state2 = 2 };

inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::state1, Outcome::state2};

constexpr int q_value(Outcome o) { return o == Outcome::state1 ? +1 : -1; }
constexpr int label(Outcome o) { return static_cast<int>(o); }

/// U(t) |state> with U(t) = cos(omega t/2) I - i sin(omega t/2) sigma_x.
/// Negative t is inverse evolution.
QubitState evolve(const QubitState& state, RabiFrequency omega, double t);

/// Unnormalized P_outcome |v>.
std::array<complex, 2> project(const std::array<complex, 2>& v, Outcome outcome);

/// ||P_outcome U(t) psi0||^2.
double prob_single(const QubitState& initial, RabiFrequency omega, double t, Outcome outcome);

/// ||P_o2 U(t2 - t1) P_o1 U(t1) psi0||^2. Throws std::invalid_argument if t2 < t1.
double prob_two_time(const QubitState& initial, RabiFrequency omega,
                     double t1, Outcome o1, double t2, Outcome o2);

/// <Q(t2) Q(t1)> for sequential projective measurements at t1 <= t2.
double correlator(const QubitState& initial, RabiFrequency omega, double t1, double t2);

/// 3 cos(omega t) - cos(3 omega t): the four-time quantity at times t, 2t, 3t, 4t
/// for the initial state |1>.
double lg_quantity_quantum(RabiFrequency omega, double t);

}  // namespace lgsim
