#include "dig/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dig {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

} // namespace

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * kGamma);
}

double CounterRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double CounterRng::normal() {
    // Box-Muller; u1 kept away from 0.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
    return CounterRng(mix64(seed_ ^ mix64(stream + 0x5851f42d4c957f2dull)));
}

void DurationDistribution::validate(int season_count) const {
    if (seasons.empty()) throw ValidationError("duration distribution: no season law");
    if (seasons.size() != 1 && static_cast<int>(seasons.size()) != season_count)
        throw ValidationError("duration distribution: law count does not match seasons");
    if (!(scale > 0.0)) throw ValidationError("duration distribution: scale must be > 0");
    for (const SeasonDuration& sd : seasons) {
        switch (sd.kind) {
            case SeasonDuration::Kind::degenerate: break;
            case SeasonDuration::Kind::uniform:
                // P(U = 0) must be 0 and E|log U| finite: keep the support positive.
                if (!(sd.a > 0.0 && sd.b >= sd.a))
                    throw ValidationError("duration distribution: uniform needs 0 < a <= b");
                break;
            case SeasonDuration::Kind::lognormal:
                if (!(sd.b >= 0.0) || !std::isfinite(sd.a))
                    throw ValidationError("duration distribution: lognormal needs finite mu, sigma >= 0");
                break;
        }
    }
}

const SeasonDuration& DurationDistribution::season(int k) const {
    return seasons.size() == 1 ? seasons.front() : seasons.at(k);
}

double DurationDistribution::mean_fraction(const SeasonSchedule& schedule, int k) const {
    const SeasonDuration& sd = season(k);
    const double base = scale * schedule.fraction(k);
    switch (sd.kind) {
        case SeasonDuration::Kind::degenerate: return base;
        case SeasonDuration::Kind::uniform: return base * 0.5 * (sd.a + sd.b);
        case SeasonDuration::Kind::lognormal: return base * std::exp(sd.a + 0.5 * sd.b * sd.b);
    }
    return base;
}

double DurationDistribution::sample_fraction(const SeasonSchedule& schedule, int k,
                                             CounterRng& rng) const {
    const SeasonDuration& sd = season(k);
    const double base = scale * schedule.fraction(k);
    switch (sd.kind) {
        case SeasonDuration::Kind::degenerate: return base;
        case SeasonDuration::Kind::uniform: return base * rng.uniform(sd.a, sd.b);
        case SeasonDuration::Kind::lognormal: return base * std::exp(sd.a + sd.b * rng.normal());
    }
    return base;
}

DurationDistribution DurationDistribution::degenerate() {
    DurationDistribution d;
    d.seasons.push_back({});
    return d;
}

namespace {

SeasonDuration parse_one(const std::string& spec) {
    SeasonDuration sd;
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "degenerate") {
        if (!args.empty()) throw ValidationError("duration spec: degenerate takes no arguments");
        return sd;
    }
    double a = 0.0, b = 0.0;
    if (std::sscanf(args.c_str(), "%lf,%lf", &a, &b) != 2)
        throw ValidationError("duration spec: expected two comma-separated numbers in '" + spec + "'");
    sd.a = a;
    sd.b = b;
    if (kind == "uniform")
        sd.kind = SeasonDuration::Kind::uniform;
    else if (kind == "lognormal")
        sd.kind = SeasonDuration::Kind::lognormal;
    else
        throw ValidationError("duration spec: unknown kind '" + kind + "'");
    return sd;
}

} // namespace

DurationDistribution DurationDistribution::parse(const std::string& spec) {
    DurationDistribution dist;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ';'))
        if (!part.empty()) dist.seasons.push_back(parse_one(part));
    if (dist.seasons.empty()) throw ValidationError("duration spec: empty");
    return dist;
}

std::string DurationDistribution::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < seasons.size(); ++i) {
        if (i > 0) os << ';';
        const SeasonDuration& sd = seasons[i];
        switch (sd.kind) {
            case SeasonDuration::Kind::degenerate: os << "degenerate"; break;
            case SeasonDuration::Kind::uniform: os << "uniform:" << sd.a << ',' << sd.b; break;
            case SeasonDuration::Kind::lognormal: os << "lognormal:" << sd.a << ',' << sd.b; break;
        }
    }
    return os.str();
}

StochasticRun simulate_random(const DynamicNetwork& net, const DurationDistribution& dist,
                              const SystemParams& params, int cycles, std::uint64_t seed) {
    if (cycles < 1) throw ValidationError("simulate_random: cycles must be >= 1");
    net.validate();
    dist.validate(net.seasons());
    if (!(params.T > 0.0)) throw ValidationError("simulate_random: T must be > 0");

    const std::vector<Matrix> gens = season_generators(net, params.m);
    CounterRng rng(seed);

    StochasticRun run;
    run.seed = seed;
    run.cycles = cycles;
    run.durations.reserve(cycles);
    run.log_growth.reserve(cycles);
    run.log_state.reserve(cycles);

    Vector x = Vector::Ones(net.n);
    double log_scale = 0.0;
    for (int j = 0; j < cycles; ++j) {
        std::vector<double> durs(net.seasons());
        const double before = x.sum();
        for (int k = 0; k < net.seasons(); ++k) {
            durs[k] = params.T * dist.sample_fraction(net.schedule, k, rng);
            x = expm(gens[k], durs[k]) * x;
            x = x.cwiseMax(0.0);
        }
        const double after = x.sum();
        if (!(after > 0.0))
            throw NumericFailure("simulate_random: population vanished numerically", 0.0);
        run.durations.push_back(std::move(durs));
        run.log_growth.push_back(std::log(after / before));
        log_scale += std::log(after);
        x /= after;
        run.log_state.push_back((x.array().log() + log_scale).matrix());
    }

    double mean = 0.0;
    for (double g : run.log_growth) mean += g;
    mean /= cycles;
    run.estimate = mean;
    if (cycles > 1) {
        double var = 0.0;
        for (double g : run.log_growth) var += (g - mean) * (g - mean);
        var /= (cycles - 1);
        run.ci_half_width = 1.96 * std::sqrt(var / cycles);
    }
    return run;
}

ChiStoc chi_stoc(const DynamicNetwork& net, const TCircuit& circuit,
                 const DurationDistribution& dist) {
    net.validate();
    dist.validate(net.seasons());
    growth_index_circuit(net, circuit); // validates the circuit on this net

    std::vector<double> dominant(net.seasons());
    for (const SimplePath& leg : circuit.legs)
        dominant[leg.season] = leg_dominant(net, leg).rate;

    ChiStoc out;
    for (int k = 0; k < net.seasons(); ++k)
        out.mean += dist.mean_fraction(net.schedule, k) * dominant[k];
    const SeasonSchedule schedule = net.schedule;
    const DurationDistribution law = dist;
    out.sampler = [schedule, law, dominant](CounterRng& rng) {
        double chi = 0.0;
        for (std::size_t k = 0; k < dominant.size(); ++k)
            chi += law.sample_fraction(schedule, static_cast<int>(k), rng) * dominant[k];
        return chi;
    };
    return out;
}

double cycle_minorization_bound(const DynamicNetwork& net, const TCircuit& circuit,
                                const std::vector<double>& realized_fractions,
                                const SystemParams& params) {
    if (static_cast<int>(realized_fractions.size()) != net.seasons())
        throw ValidationError("cycle_minorization_bound: one fraction per season required");
    double c_product = 1.0;
    double chi_cycle = 0.0;
    int total_links = 0;
    for (const SimplePath& leg : circuit.legs) {
        const DominantSite dom = leg_dominant(net, leg);
        double floor = dom.rate;
        for (int site : leg.sites) floor = std::min(floor, net.growth_rate(leg.season, site));
        PathBoundConstants pc;
        pc.r = dom.rate;
        pc.s = floor - 1.0;
        pc.d = dom.position;
        pc.l = leg.length();
        pc.theta = params.T * realized_fractions[leg.season]; // C_k at the realized duration
        c_product *= c_theta(pc);
        chi_cycle += realized_fractions[leg.season] * dom.rate;
        total_links += leg.length();
    }
    return c_product * std::pow(params.m, total_links) *
           std::exp(params.T * (chi_cycle - net.n * params.m));
}

StochasticThresholdBound stochastic_threshold_bound(const DynamicNetwork& net,
                                                    const TCircuit& circuit,
                                                    const DurationDistribution& dist, double T,
                                                    double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("stochastic_threshold_bound: epsilon must be in (0,1)");
    const ChiStoc chi = chi_stoc(net, circuit, dist);
    if (!(chi.mean > 0.0))
        throw std::domain_error("stochastic_threshold_bound: requires chi_stoc > 0");
    const int L = circuit.total_length();
    if (L < 1) throw std::domain_error("stochastic_threshold_bound: circuit has no links");

    StochasticThresholdBound out;
    out.value = std::exp(-(1.0 - epsilon) * T * chi.mean / L);
    out.regime_limit = 0.5 * epsilon * chi.mean / std::max(net.n - 1, 1);
    out.regime_ok = out.value < out.regime_limit;
    out.note = "negative exponent: the bound decays exponentially in T";
    return out;
}

void write_run_csv(std::ostream& os, const StochasticRun& run) {
    const std::size_t p = run.durations.empty() ? 0 : run.durations.front().size();
    os << "cycle";
    for (std::size_t k = 1; k <= p; ++k) os << ",duration_" << k;
    os << ",log_growth\n";
    char buf[32];
    for (int j = 0; j < run.cycles; ++j) {
        os << j + 1;
        for (std::size_t k = 0; k < p; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", run.durations[j][k]);
            os << ',' << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", run.log_growth[j]);
        os << ',' << buf << '\n';
    }
}

} // namespace dig
