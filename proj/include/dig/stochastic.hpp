#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dig/bounds.hpp"
#include "dig/circuits.hpp"
#include "dig/network.hpp"

namespace dig {

/**
 * Counter-based generator (SplitMix64): output i is a fixed mix of
 * seed + i*gamma, so streams are reproducible across platforms and
 * sub-streams can be split off deterministically.
 */
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();
    double uniform01(); // [0, 1)
    double uniform(double a, double b);
    double normal(); // standard normal, Box-Muller

    /// Independent stream derived from this seed and a stream index.
    CounterRng split(std::uint64_t stream) const;

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Per-season duration law for one cycle: the realized duration of season k
/// is T * scale * fraction_k * J_k with J_k the season's jitter draw
/// (J == 1 for degenerate).
struct SeasonDuration {
    enum class Kind { degenerate, uniform, lognormal };
    Kind kind = Kind::degenerate;
    double a = 0.0; // uniform lo / lognormal mu
    double b = 0.0; // uniform hi / lognormal sigma
};

struct DurationDistribution {
    std::vector<SeasonDuration> seasons; // one entry, or one per season
    double scale = 1.0;

    void validate(int season_count) const;
    const SeasonDuration& season(int k) const;
    /// E(U_k) as a fraction of the period.
    double mean_fraction(const SeasonSchedule& schedule, int k) const;
    double sample_fraction(const SeasonSchedule& schedule, int k, CounterRng& rng) const;

    static DurationDistribution degenerate();
    /// "degenerate" | "uniform:a,b" | "lognormal:mu,sigma", optionally one
    /// spec per season separated by ';'.
    static DurationDistribution parse(const std::string& spec);
    std::string describe() const;
};

struct StochasticRun {
    std::uint64_t seed = 0;
    int cycles = 0;
    std::vector<std::vector<double>> durations; // per cycle, per season (time units)
    std::vector<double> log_growth;             // per cycle, of the total population
    std::vector<Vector> log_state;              // per cycle, log x_i at the cycle end
    double estimate = 0.0;                      // mean of log_growth
    double ci_half_width = 0.0;                 // 1.96 * stderr
};

/**
 * Cycle-by-cycle propagation with realized season durations, renormalizing
 * each cycle and accumulating the log scale. Deterministic under a fixed
 * seed. x0 defaults to all-ones.
 */
StochasticRun simulate_random(const DynamicNetwork& net, const DurationDistribution& dist,
                              const SystemParams& params, int cycles, std::uint64_t seed);

struct ChiStoc {
    double mean = 0.0; // sum_k E(U_k) * dominant rate of leg k
    std::function<double(CounterRng&)> sampler;
};

/// Random growth index of a circuit under the duration law: the sampler
/// draws one cycle's chi_stoc, mean is its closed-form expectation.
ChiStoc chi_stoc(const DynamicNetwork& net, const TCircuit& circuit,
                 const DurationDistribution& dist);

/// Right-hand side of the per-cycle minorization: (prod_k C_k(T u_k))
/// m^L e^{T(chi_cycle - n m)} for realized fractions u (one per season).
double cycle_minorization_bound(const DynamicNetwork& net, const TCircuit& circuit,
                                const std::vector<double>& realized_fractions,
                                const SystemParams& params);

struct StochasticThresholdBound {
    double value = 0.0; // e^{-(1/L)(1-eps) T chi_stoc}
    double regime_limit = 0.0; // (eps/2) chi_stoc / (n-1)
    bool regime_ok = false;    // value < regime_limit
    std::string note;
};

/// Exponentially small stochastic threshold bound, e^{-(1/L)(1-eps) T chi};
/// decays in T whenever chi_stoc > 0.
StochasticThresholdBound stochastic_threshold_bound(const DynamicNetwork& net,
                                                    const TCircuit& circuit,
                                                    const DurationDistribution& dist, double T,
                                                    double epsilon);

/// CSV "cycle,duration_1..duration_p,log_growth".
void write_run_csv(std::ostream& os, const StochasticRun& run);

} // namespace dig
