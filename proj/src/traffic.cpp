#include "urllc/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace urllc {

PoissonArrivals::PoissonArrivals(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("PoissonArrivals: lambda must be > 0");
}

EffectiveBandwidth PoissonArrivals::effective_bandwidth(double eps_q, int delay_frames) const {
    return urllc::effective_bandwidth(lambda_, eps_q, delay_frames);
}

EffectiveBandwidth effective_bandwidth(double lambda, double eps_q, int delay_frames) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("effective_bandwidth: lambda must be > 0");
    if (!(eps_q > 0.0 && eps_q < 1.0)) throw std::invalid_argument("effective_bandwidth: eps_q must lie in (0, 1)");
    if (delay_frames < 1) throw std::invalid_argument("effective_bandwidth: delay_frames must be >= 1");

    // One frame is the time unit, so T_f = 1 in the Poisson formula.
    const double log_inv = -std::log(eps_q);
    const double d = static_cast<double>(delay_frames);
    const double ratio = log_inv / (lambda * d);
    EffectiveBandwidth eb;
    // log_inv/log1p(ratio) -> lambda*d as ratio -> 0; the quotient form keeps
    // full precision at both ends.
    eb.value = ratio > 0.0 ? lambda * ratio / std::log1p(ratio) : lambda;
    eb.lambda = lambda;
    eb.eps_q = eps_q;
    eb.delay_frames = delay_frames;
    return eb;
}

bool queueing_constraint_met(double service_rate, const EffectiveBandwidth& eb) { return service_rate >= eb.value; }

}  // namespace urllc
