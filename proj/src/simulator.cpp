#include "urllc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "urllc/rate_model.hpp"

namespace urllc {

SimPolicy make_policy(const Allocation& a, const std::vector<UserProfile>& users) {
    if (a.users.size() != users.size()) throw std::invalid_argument("make_policy: user count mismatch");
    SimPolicy p;
    p.antennas = a.antennas;
    p.delay_frames = a.qos.queue_delay_frames;
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& u = a.users[k];
        p.users.push_back({u.bandwidth, u.snr_target, u.gain_threshold, u.power_cap, u.effective_bandwidth,
                           users[k].large_scale_gain, users[k].arrival_rate, a.qos.eps_c});
    }
    return p;
}

double draw_channel_gain(CellRng& rng, int n) {
    if (n < 1) throw std::invalid_argument("draw_channel_gain: n must be >= 1");
    // -log of a product of up to 8 uniforms stays far from underflow.
    double g = 0.0;
    for (int done = 0; done < n;) {
        double prod = 1.0;
        const int chunk = std::min(8, n - done);
        for (int i = 0; i < chunk; ++i) prod *= rng.uniform();
        g -= std::log(prod);
        done += chunk;
    }
    return g;
}

std::uint64_t draw_poisson(CellRng& rng, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("draw_poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        const double u = rng.uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && p > 0.0) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Hormann's transformed rejection with squeeze (PTRS).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double U = rng.uniform() - 0.5;
        const double V = rng.uniform();
        const double us = 0.5 - std::abs(U);
        const double k = std::floor((2.0 * a / us + b) * U + mean + 0.43);
        if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && V > us)) continue;
        if (std::log(V) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

namespace {

// Remainders below this are rounding noise between the fluid total and the
// per-packet bookkeeping.
constexpr double kResidual = 1e-9;

// Removes `amount` of fluid from the head of the queue; `on_complete` sees
// each packet whose last fraction left.
template <class OnComplete>
void drain_head(UserQueue& q, double amount, OnComplete&& on_complete) {
    while (amount > 0.0 && !q.packets.empty()) {
        Packet& head = q.packets.front();
        if (head.remaining <= amount + kResidual) {
            amount -= head.remaining;
            on_complete(head);
            q.packets.pop_front();
        } else {
            head.remaining -= amount;
            amount = 0.0;
        }
    }
}

}  // namespace

FrameRecord step_queue(UserQueue& q, double g, const UserPolicy& policy, int delay_frames, std::uint64_t frame,
                       CellRng& rng, const SystemConfig& cfg) {
    FrameRecord rec;
    rec.frame = frame;
    rec.gain = g;
    auto& t = q.tally;
    ++t.frames;

    const bool deep_fade = g < policy.gain_threshold;
    double service = policy.service_rate_nominal;
    double drop = 0.0;
    if (deep_fade) {
        ++t.deep_fade_frames;
        rec.power = policy.power_cap;
        const double snr = policy.alpha * policy.power_cap * g / (cfg.noise_psd * policy.bandwidth);
        const double rate = achievable_rate_at_snr(snr, policy.bandwidth, policy.eps_c, cfg);
        service = std::max(0.0, rate);
        if (q.content > 0.0) drop = std::clamp(policy.service_rate_nominal - rate, 0.0, q.content);
    } else {
        rec.power = cfg.noise_psd * policy.bandwidth * policy.gamma / (policy.alpha * g);
    }
    t.tx_power_sum += rec.power;

    if (drop > 0.0) {
        ++t.drop_events;
        t.dropped += drop;
        q.content -= drop;
        drain_head(q, drop, [](const Packet&) {});
    }

    const std::uint64_t a = draw_poisson(rng, policy.arrival_rate);
    for (std::uint64_t i = 0; i < a; ++i) q.packets.push_back({frame, 1.0});
    q.content += static_cast<double>(a);
    t.arrivals += static_cast<double>(a);

    const double served = std::min(service, q.content);
    t.served += served;
    q.content -= served;
    drain_head(q, served, [&](const Packet& p) {
        ++t.completed_packets;
        if (frame - p.arrival_frame + 1 > static_cast<std::uint64_t>(delay_frames)) ++t.delay_violations;
    });
    // The fluid sum and the per-packet remainders drift apart by rounding;
    // the packet list is authoritative once it empties.
    if (q.packets.empty()) {
        t.served += q.content;
        q.content = 0.0;
    }

    if (q.content > policy.service_rate_nominal * delay_frames) ++t.overflow_frames;

    rec.arrivals = a;
    rec.service = service;
    rec.drop = drop;
    rec.queue_after = q.content;
    return rec;
}

namespace {

struct StreamResult {
    std::vector<UserQueue> queues;
};

std::uint64_t stream_frames(std::uint64_t frames, std::uint32_t streams, std::uint32_t s) {
    return frames / streams + (s < frames % streams ? 1 : 0);
}

StreamResult run_stream(const SimPolicy& policy, const SystemConfig& cfg, const SimOptions& opts, std::uint32_t s) {
    StreamResult out;
    out.queues.resize(policy.users.size());
    const std::uint64_t n = stream_frames(opts.frames, opts.streams, s);
    std::ostream* trace = (s == 0) ? opts.trace : nullptr;
    for (std::uint64_t f = 0; f < n; ++f) {
        for (std::size_t k = 0; k < policy.users.size(); ++k) {
            CellRng rng(opts.seed, s, f, static_cast<std::uint32_t>(k));
            const double g = draw_channel_gain(rng, policy.antennas);
            const auto rec = step_queue(out.queues[k], g, policy.users[k], policy.delay_frames, f, rng, cfg);
            if (trace && k == opts.trace_user)
                *trace << fmt::format("{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", rec.frame, rec.gain,
                                      rec.power, rec.arrivals, rec.service, rec.drop, rec.queue_after);
        }
    }
    return out;
}

void check_options(const SimPolicy& policy, const SimOptions& opts) {
    if (opts.frames < 1) throw std::invalid_argument("run_simulation: frames must be >= 1");
    if (opts.streams < 1) throw std::invalid_argument("run_simulation: streams must be >= 1");
    if (policy.users.empty()) throw std::invalid_argument("run_simulation: policy has no users");
    if (policy.users.size() >= (1u << 12)) throw std::invalid_argument("run_simulation: at most 4095 users");
    if (opts.trace && opts.trace_user >= policy.users.size())
        throw std::invalid_argument("run_simulation: trace_user out of range");
}

SimReport reduce(const std::vector<StreamResult>& results, const SimPolicy& policy, const SimOptions& opts) {
    SimReport r;
    r.frames_run = opts.frames;
    r.rng_seed = opts.seed;
    r.stream_count = opts.streams;
    r.users.resize(policy.users.size());
    std::uint64_t completed = 0;
    std::uint64_t violations = 0;
    std::uint64_t overflows = 0;
    for (std::size_t k = 0; k < policy.users.size(); ++k) {
        auto& u = r.users[k];
        double power_sum = 0.0;
        std::uint64_t overflow = 0;
        for (const auto& res : results) {  // ascending stream order
            const auto& q = res.queues[k];
            u.arrival_count += q.tally.arrivals;
            u.served_count += q.tally.served;
            u.drop_count += q.tally.dropped;
            u.final_queue += q.content;
            u.drop_events += q.tally.drop_events;
            u.deep_fade_frames += q.tally.deep_fade_frames;
            u.completed_packets += q.tally.completed_packets;
            u.delay_violations += q.tally.delay_violations;
            overflow += q.tally.overflow_frames;
            power_sum += q.tally.tx_power_sum;
        }
        const double frames = static_cast<double>(opts.frames);
        u.achieved_eps_h = u.arrival_count > 0.0 ? u.drop_count / u.arrival_count : 0.0;
        u.empirical_mean_tx_power = power_sum / frames;
        u.empirical_delay_violation =
            u.completed_packets > 0 ? static_cast<double>(u.delay_violations) / u.completed_packets : 0.0;
        u.deep_fade_fraction = static_cast<double>(u.deep_fade_frames) / frames;
        u.empirical_queue_overflow = static_cast<double>(overflow) / frames;
        overflows += overflow;

        r.arrival_count += u.arrival_count;
        r.drop_count += u.drop_count;
        r.served_count += u.served_count;
        r.final_queue += u.final_queue;
        r.drop_events += u.drop_events;
        r.empirical_mean_tx_power += u.empirical_mean_tx_power;
        completed += u.completed_packets;
        violations += u.delay_violations;
    }
    r.achieved_eps_h = r.arrival_count > 0.0 ? r.drop_count / r.arrival_count : 0.0;
    r.empirical_delay_violation = completed > 0 ? static_cast<double>(violations) / completed : 0.0;
    r.empirical_queue_overflow =
        static_cast<double>(overflows) / (static_cast<double>(opts.frames) * static_cast<double>(policy.users.size()));
    return r;
}

}  // namespace

SimReport run_simulation(const SimPolicy& policy, const SystemConfig& cfg, const SimOptions& opts) {
    check_options(policy, opts);
    std::vector<StreamResult> results(opts.streams);
    const auto streams = static_cast<std::int64_t>(opts.streams);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t s = 0; s < streams; ++s)
        results[s] = run_stream(policy, cfg, opts, static_cast<std::uint32_t>(s));
    return reduce(results, policy, opts);
}

SimReport run_simulation_serial(const SimPolicy& policy, const SystemConfig& cfg, const SimOptions& opts) {
    check_options(policy, opts);
    std::vector<StreamResult> results;
    results.reserve(opts.streams);
    for (std::uint32_t s = 0; s < opts.streams; ++s) results.push_back(run_stream(policy, cfg, opts, s));
    return reduce(results, policy, opts);
}

nlohmann::json to_json(const SimReport& r) {
    nlohmann::json users = nlohmann::json::array();
    for (const auto& u : r.users) {
        users.push_back({{"arrival_count", u.arrival_count},
                         {"served_count", u.served_count},
                         {"drop_count", u.drop_count},
                         {"final_queue", u.final_queue},
                         {"drop_events", u.drop_events},
                         {"deep_fade_frames", u.deep_fade_frames},
                         {"completed_packets", u.completed_packets},
                         {"delay_violations", u.delay_violations},
                         {"achieved_eps_h", u.achieved_eps_h},
                         {"empirical_mean_tx_power", u.empirical_mean_tx_power},
                         {"empirical_delay_violation", u.empirical_delay_violation},
                         {"empirical_queue_overflow", u.empirical_queue_overflow},
                         {"deep_fade_fraction", u.deep_fade_fraction}});
    }
    return {{"frames_run", r.frames_run},
            {"achieved_eps_h", r.achieved_eps_h},
            {"empirical_mean_tx_power", r.empirical_mean_tx_power},
            {"empirical_delay_violation", r.empirical_delay_violation},
            {"empirical_queue_overflow", r.empirical_queue_overflow},
            {"arrival_count", r.arrival_count},
            {"drop_count", r.drop_count},
            {"served_count", r.served_count},
            {"final_queue", r.final_queue},
            {"drop_events", r.drop_events},
            {"rng_seed", r.rng_seed},
            {"stream_count", r.stream_count},
            {"users", users}};
}

}  // namespace urllc
