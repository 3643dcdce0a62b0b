#include "lgsim/quantum_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lgsim {

namespace {

double squared_norm(const std::array<complex, 2>& v) {
    return std::norm(v[0]) + std::norm(v[1]);
}

std::array<complex, 2> apply_u(const std::array<complex, 2>& v, double omega, double t) {
    const double half = 0.5 * omega * t;
    const complex c{std::cos(half), 0.0};
    const complex s{0.0, -std::sin(half)};
    return {c * v[0] + s * v[1], s * v[0] + c * v[1]};
}

void require_ordered(double t1, double t2) {
    if (t2 < t1) {
        throw std::invalid_argument("two-time quantity requires t1 <= t2 (got t1=" +
                                    std::to_string(t1) + ", t2=" + std::to_string(t2) + ")");
    }
}

}  // namespace

QubitState::QubitState(complex amplitude_1, complex amplitude_2) : amp_{amplitude_1, amplitude_2} {
    if (std::abs(squared_norm(amp_) - 1.0) > kAnalyticTolerance) {
        throw std::invalid_argument("QubitState amplitudes are not normalized");
    }
}

QubitState QubitState::normalized(complex amplitude_1, complex amplitude_2) {
    const double n = std::sqrt(std::norm(amplitude_1) + std::norm(amplitude_2));
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return {amplitude_1 / n, amplitude_2 / n};
}

double QubitState::norm() const { return std::sqrt(squared_norm(amp_)); }

RabiFrequency::RabiFrequency(double omega) : omega_(omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("Rabi frequency must be a finite positive number");
    }
}

QubitState evolve(const QubitState& state, RabiFrequency omega, double t) {
    const auto v = apply_u(state.amplitudes(), omega.value(), t);
    // U is unitary; renormalizing only strips rounding drift.
    return QubitState::normalized(v[0], v[1]);
}

std::array<complex, 2> project(const std::array<complex, 2>& v, Outcome outcome) {
    if (outcome == Outcome::state1) return {v[0], complex{}};
    return {complex{}, v[1]};
}

double prob_single(const QubitState& initial, RabiFrequency omega, double t, Outcome outcome) {
    return squared_norm(project(apply_u(initial.amplitudes(), omega.value(), t), outcome));
}

double prob_two_time(const QubitState& initial, RabiFrequency omega,
                     double t1, Outcome o1, double t2, Outcome o2) {
    require_ordered(t1, t2);
    const auto after_first = project(apply_u(initial.amplitudes(), omega.value(), t1), o1);
    const auto after_second = project(apply_u(after_first, omega.value(), t2 - t1), o2);
    return squared_norm(after_second);
}

double correlator(const QubitState& initial, RabiFrequency omega, double t1, double t2) {
    require_ordered(t1, t2);
    double e = 0.0;
    for (Outcome o1 : kOutcomes) {
        for (Outcome o2 : kOutcomes) {
            e += q_value(o1) * q_value(o2) * prob_two_time(initial, omega, t1, o1, t2, o2);
        }
    }
    return e;
}

double lg_quantity_quantum(RabiFrequency omega, double t) {
    const double x = omega.value() * t;
    return 3.0 * std::cos(x) - std::cos(3.0 * x);
}

}  // namespace lgsim
