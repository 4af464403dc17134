#pragma once

// Effective bandwidth of the arrival process and the queueing-delay check.

namespace urllc {

struct EffectiveBandwidth {
    double value = 0.0;   // E^B [packets/frame]
    double lambda = 0.0;  // mean arrivals [packets/frame]
    double eps_q = 0.0;
    int delay_frames = 0;
};

/// Arrival processes that can report the constant service rate needed to
/// keep the delay bound `delay_frames` violated with probability <= eps_q.
class ArrivalModel {
public:
    virtual ~ArrivalModel() = default;
    virtual double mean_rate() const = 0;
    virtual EffectiveBandwidth effective_bandwidth(double eps_q, int delay_frames) const = 0;
};

class PoissonArrivals final : public ArrivalModel {
public:
    explicit PoissonArrivals(double lambda);
    double mean_rate() const override { return lambda_; }
    EffectiveBandwidth effective_bandwidth(double eps_q, int delay_frames) const override;

private:
    double lambda_;
};

/// Poisson effective bandwidth with rates expressed per frame.
EffectiveBandwidth effective_bandwidth(double lambda, double eps_q, int delay_frames);

bool queueing_constraint_met(double service_rate, const EffectiveBandwidth& eb);

}  // namespace urllc
