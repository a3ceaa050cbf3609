// Command-line front end: simulate | circuits | analyze | sweep |
// stochastic | bound. Exit codes: 0 success, 2 validation, 3 numeric
// failure, 4 I/O.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dig/analysis.hpp"
#include "dig/bounds.hpp"
#include "dig/circuits.hpp"
#include "dig/netio.hpp"
#include "dig/network.hpp"
#include "dig/stochastic.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::string& out_path, const std::string& contents) {
    if (out_path.empty() || out_path == "-")
        std::cout << contents;
    else
        dig::write_file_atomic(out_path, contents);
}

dig::Range parse_range(const std::string& text, bool log_spaced) {
    dig::Range range;
    range.log_spaced = log_spaced;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &range.lo, &range.hi, &range.count) != 3)
        throw dig::ValidationError("range '" + text + "' is not LO:HI:N");
    if (range.count < 1 || !(range.hi >= range.lo))
        throw dig::ValidationError("range '" + text + "' is not increasing");
    if (log_spaced && !(range.lo > 0.0))
        throw dig::ValidationError("log range needs LO > 0");
    return range;
}

dig::Vector parse_x0(const std::string& text, int n) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != n)
        throw dig::ValidationError("--x0 needs one value per site");
    dig::Vector x = Eigen::Map<const dig::Vector>(vals.data(), vals.size());
    if ((x.array() < 0.0).any()) throw dig::ValidationError("--x0 must be nonnegative");
    return x;
}

int run_simulate(const std::string& net_path, double m, double T, int periods, double step,
                 const std::string& x0_text, const std::string& out) {
    const dig::DynamicNetwork net = dig::load_network(net_path);
    dig::Vector x = x0_text.empty() ? dig::Vector::Ones(net.n) : parse_x0(x0_text, net.n);
    if (!(T > 0.0) || periods < 1) throw dig::ValidationError("need T > 0 and --periods >= 1");
    if (!(step > 0.0)) step = T / 200.0;

    const auto gens = dig::season_generators(net, m);
    std::map<std::pair<int, double>, dig::Matrix> cache;
    const auto stepper = [&](int season, double h) -> const dig::Matrix& {
        const auto key = std::make_pair(season, h);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, dig::expm(gens[season], h)).first;
        return it->second;
    };

    std::ostringstream os;
    os << 't';
    for (int i = 0; i < net.n; ++i) os << ",log_x_" << i + 1;
    os << '\n';
    const auto sample = [&](double t) {
        os << fmt17(t);
        for (int i = 0; i < net.n; ++i) os << ',' << fmt17(std::log(x(i)));
        os << '\n';
    };

    double now = 0.0;
    sample(now);
    const double horizon = periods * T;
    int season = 0, period = 0;
    double season_end = T * net.schedule.breakpoints[1];
    double next_sample = step;
    while (now < horizon - 1e-12 * horizon) {
        const double target = std::min(next_sample, std::min(season_end, horizon));
        const double h = target - now;
        if (h > 0.0) x = stepper(season, h) * x;
        now = target;
        if (now >= next_sample - 1e-12 * std::max(1.0, next_sample)) {
            sample(now);
            next_sample += step;
        }
        if (now >= season_end - 1e-12 * std::max(1.0, season_end)) {
            ++season;
            if (season == net.seasons()) {
                season = 0;
                ++period;
            }
            season_end = T * (period + net.schedule.breakpoints[season + 1]);
        }
    }
    emit(out, os.str());
    return 0;
}

json circuit_json(const dig::QTCircuit& c, double index) {
    json j;
    j["circuit"] = dig::bar_notation(c);
    j["q"] = c.q;
    j["length"] = c.total_length();
    j["index"] = index;
    return j;
}

int run_circuits(const std::string& net_path, int q_max, int max_walk_len, int max_count,
                 const std::string& out) {
    const dig::DynamicNetwork net = dig::load_network(net_path);
    if (q_max < 1) q_max = net.seasons();
    if (max_walk_len < 1) max_walk_len = 2 * net.n;

    struct Row {
        double index;
        int q;
        int length;
        std::string bar;
    };
    std::vector<Row> rows;
    bool truncated = false;
    const dig::TCircuitList simple = dig::enumerate_tcircuits(net, max_count);
    truncated |= simple.truncated;
    for (const dig::TCircuit& c : simple.circuits)
        rows.push_back({dig::growth_index_circuit(net, c), 1, c.total_length(), bar_notation(c)});
    for (int q = 2; q <= q_max; ++q) {
        const dig::QTCircuitList walks = dig::enumerate_qtcircuits(net, q, max_walk_len, max_count);
        truncated |= walks.truncated;
        for (const dig::QTCircuit& c : walks.circuits)
            rows.push_back(
                {dig::growth_index_qcircuit(net, c), q, c.total_length(), bar_notation(c)});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.index > b.index; });

    std::ostringstream os;
    os << "network: " << net_path << "\n";
    os << "growth index chi = " << fmt17(dig::growth_index_system(net)) << "\n";
    if (rows.empty()) {
        os << (q_max > 1 ? "no circuit found\n" : "no T-circuit\n");
    } else {
        os << "sufficient-condition hypothesis (some chi^C > 0): "
           << (rows.front().index > 0.0 ? "holds" : "fails") << "\n";
        os << "index q length circuit\n";
        for (const Row& row : rows)
            os << fmt17(row.index) << ' ' << row.q << ' ' << row.length << ' ' << row.bar << '\n';
    }
    if (truncated) os << "(truncated at --max-count)\n";
    emit(out, os.str());
    return 0;
}

int run_analyze(const std::string& net_path, double m, double T, double theta, int q_max,
                int max_walk_len, const std::string& out) {
    const dig::DynamicNetwork net = dig::load_network(net_path);
    dig::AnalysisOptions opts;
    opts.with_circuits = true;
    opts.q_max = q_max;
    opts.max_walk_len = max_walk_len;
    opts.theta = theta;
    const dig::GrowthReport report = dig::lyapunov(net, {m, T}, opts);

    std::ostringstream os;
    os << "network: " << net_path << "\n";
    os << "m = " << fmt17(m) << ", T = " << fmt17(T) << "\n";
    os << "lambda = " << fmt17(report.lambda) << "\n";
    os << "Lambda = " << fmt17(report.Lyapunov) << "\n";
    os << "verdict: " << dig::to_string(report.verdict) << "\n";
    os << "chi = " << fmt17(report.chi) << "\n";
    if (!report.numeric_ok) os << "numeric failure: " << report.note << "\n";

    for (int i = 0; i < net.n; ++i) {
        const double entry = dig::entry_growth(net, {m, T}, i, i);
        if (entry > 1.0)
            os << "entry certificate: [M]_{" << i + 1 << ',' << i + 1 << "} = " << fmt17(entry)
               << " > 1 (growth)\n";
    }
    for (int k = 0; k < net.seasons(); ++k)
        for (const dig::SimplePath& p : dig::dead_end_paths(net, k)) {
            os << "dead-end path in season " << k + 1 << ": ";
            for (std::size_t i = 0; i < p.sites.size(); ++i)
                os << (i ? "->" : "") << p.sites[i] + 1;
            os << "\n";
        }

    json machine;
    machine["m"] = m;
    machine["T"] = T;
    machine["lambda"] = report.lambda;
    machine["Lambda"] = report.Lyapunov;
    machine["verdict"] = dig::to_string(report.verdict);
    machine["chi"] = report.chi;
    machine["numeric_ok"] = report.numeric_ok;
    machine["circuits"] = json::array();

    if (!report.circuits.empty()) {
        os << "circuits (best first):\n";
        const std::size_t shown = std::min<std::size_t>(report.circuits.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) {
            const auto& entry = report.circuits[i];
            os << "  chi^C = " << fmt17(entry.index) << "  H(m,T) = " << fmt17(entry.H) << "  "
               << dig::bar_notation(entry.circuit) << "\n";
            json cj = circuit_json(entry.circuit, entry.index);
            cj["H"] = entry.H;
            cj["C"] = entry.bound.C;
            cj["L"] = entry.bound.L;
            cj["mu"] = entry.bound.mu;
            cj["T_star"] = entry.bound.T_star;
            machine["circuits"].push_back(std::move(cj));
        }
        if (report.circuits.front().H > 1.0)
            os << "sufficient condition: H(m,T) > 1 certifies growth\n";
    }
    os << "machine: " << machine.dump() << "\n";
    emit(out, os.str());
    return report.numeric_ok ? 0 : 3; // partial report, numeric-failure exit
}

int run_sweep(const std::string& net_path, const std::string& m_range_text,
              const std::string& T_range_text, bool with_threshold, const std::string& out) {
    const dig::DynamicNetwork net = dig::load_network(net_path);
    const dig::Range m_range = parse_range(m_range_text, true);
    const dig::Range T_range = parse_range(T_range_text, false);
    if (with_threshold && (out.empty() || out == "-"))
        throw dig::ValidationError("--threshold needs --out FILE (writes FILE plus a "
                                   ".threshold.csv companion)");
    const dig::SweepGrid grid = dig::sweep(net, m_range, T_range, with_threshold);
    std::ostringstream os;
    dig::write_sweep_csv(os, grid);
    emit(out, os.str());
    if (with_threshold) {
        std::string tpath = out;
        const auto dot = tpath.rfind('.');
        tpath = (dot == std::string::npos ? tpath : tpath.substr(0, dot)) + ".threshold.csv";
        std::ostringstream ts;
        dig::write_threshold_csv(ts, grid);
        emit(tpath, ts.str());
    }
    return 0;
}

int run_stochastic(const std::string& net_path, double m, double T, int cycles,
                   std::uint64_t seed, const std::string& dist_text, const std::string& out) {
    const dig::DynamicNetwork net = dig::load_network(net_path);
    const dig::DurationDistribution dist = dist_text.empty()
                                               ? dig::DurationDistribution::degenerate()
                                               : dig::DurationDistribution::parse(dist_text);
    const dig::StochasticRun run = dig::simulate_random(net, dist, {m, T}, cycles, seed);
    std::ostringstream os;
    dig::write_run_csv(os, run);
    emit(out, os.str());

    std::ostringstream summary;
    summary << "seed = " << run.seed << ", cycles = " << run.cycles << ", dist = "
            << dist.describe() << "\n";
    summary << "mean log growth per cycle = " << fmt17(run.estimate) << " +- "
            << fmt17(run.ci_half_width) << " (95%)\n";
    summary << "per-time growth estimate = " << fmt17(run.estimate / T) << "\n";
    if (out.empty() || out == "-")
        std::cerr << summary.str();
    else
        std::cout << summary.str();
    return 0;
}

int run_bound(const std::string& net_path, std::optional<double> m, double T, double theta,
              int q_max, int max_walk_len, const std::string& dist_text, double epsilon,
              const std::string& out) {
    const dig::DynamicNetwork net = dig::load_network(net_path);
    if (!(T > 0.0)) throw dig::ValidationError("need --T > 0");
    if (q_max < 1) q_max = net.seasons();
    if (max_walk_len < 1) max_walk_len = 2 * net.n;
    const auto best = dig::best_circuit(net, q_max, max_walk_len);

    std::ostringstream os;
    json machine;
    os << "network: " << net_path << "\n";
    if (!best) {
        os << "no circuit found up to q_max = " << q_max << "\n";
        machine["circuit"] = nullptr;
    } else {
        const double th = theta > 0.0 ? theta : dig::default_theta(net, T);
        const dig::CircuitBound bound = dig::circuit_bound(net, best->circuit, th);
        os << "best circuit: " << dig::bar_notation(best->circuit) << "\n";
        os << "chi^C = " << fmt17(best->index) << ", L = " << bound.L << ", C(theta) = "
           << fmt17(bound.C) << ", mu = " << fmt17(bound.mu) << ", T* = " << fmt17(bound.T_star)
           << "\n";
        machine = circuit_json(best->circuit, best->index);
        machine["C"] = bound.C;
        machine["mu"] = bound.mu;
        machine["T_star"] = bound.T_star;
        machine["theta"] = th;
        if (m && T > bound.T_star) {
            const double h = dig::minimizing_function(*m, T, bound);
            os << "H(m,T) = " << fmt17(h) << (h > 1.0 ? "  (certifies growth)" : "") << "\n";
            machine["H"] = h;
        }
        if (bound.chi_c > 0.0 && bound.L >= 1) {
            const dig::ThresholdBound tb = dig::threshold_bound(bound, T);
            os << "threshold bound e^{-alpha T} = " << fmt17(tb.value)
               << (tb.applicable ? " (applicable)" : " (not applicable at this T)") << "\n";
            os << "safe threshold bound = " << fmt17(tb.safe_value)
               << (tb.safe_applicable ? " (applicable)" : " (not applicable at this T)") << "\n";
            machine["threshold_bound"] = tb.value;
            machine["threshold_applicable"] = tb.applicable;
            machine["safe_threshold_bound"] = tb.safe_value;
            machine["safe_threshold_applicable"] = tb.safe_applicable;
            if (!dist_text.empty() && best->circuit.q == 1) {
                dig::TCircuit simple;
                simple.legs = best->circuit.legs;
                bool all_simple = true;
                for (const auto& leg : simple.legs) all_simple = all_simple && leg.is_simple();
                if (all_simple) {
                    const auto sb = dig::stochastic_threshold_bound(
                        net, simple, dig::DurationDistribution::parse(dist_text), T, epsilon);
                    os << "stochastic threshold bound = " << fmt17(sb.value)
                       << " (epsilon = " << epsilon << "; " << sb.note << ")\n";
                    machine["stochastic_threshold_bound"] = sb.value;
                }
            }
        }
    }
    os << "machine: " << machine.dump() << "\n";
    emit(out, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"population growth on season-switched migration networks"};
    app.require_subcommand(1);

    std::string net_path, out, x0_text, m_range_text, T_range_text, dist_text;
    double m = 0.0, T = 1.0, step = 0.0, theta = 0.0, epsilon = 0.5;
    int periods = 10, q_max = 0, max_walk_len = 0, max_count = 1000000, cycles = 1000;
    std::uint64_t seed = 0;
    bool with_threshold = false;

    auto* simulate = app.add_subcommand("simulate", "per-site log-population trajectory CSV");
    simulate->add_option("--net", net_path, "network config file")->required();
    simulate->add_option("--m", m, "migration intensity")->required();
    simulate->add_option("--T", T, "period")->required();
    simulate->add_option("--periods", periods, "number of periods");
    simulate->add_option("--step", step, "sample step (default T/200)");
    simulate->add_option("--x0", x0_text, "initial populations, comma separated");
    simulate->add_option("--out", out, "output path ('-' for stdout)");

    auto* circuits = app.add_subcommand("circuits", "list circuits with growth indices");
    circuits->add_option("--net", net_path)->required();
    circuits->add_option("--q-max", q_max, "max periods per circuit (default: seasons)");
    circuits->add_option("--max-walk-len", max_walk_len, "walk length cap (default 2n)");
    circuits->add_option("--max-count", max_count);
    circuits->add_option("--out", out);

    auto* analyze = app.add_subcommand("analyze", "full growth report at one (m,T)");
    analyze->add_option("--net", net_path)->required();
    analyze->add_option("--m", m)->required();
    analyze->add_option("--T", T)->required();
    analyze->add_option("--theta", theta, "bound warm-up (default: half shortest season)");
    analyze->add_option("--q-max", q_max);
    analyze->add_option("--max-walk-len", max_walk_len);
    analyze->add_option("--out", out);

    auto* sweep_cmd = app.add_subcommand("sweep", "Lambda over an (m,T) grid, CSV");
    sweep_cmd->add_option("--net", net_path)->required();
    sweep_cmd->add_option("--m-range", m_range_text, "LO:HI:N, log spaced")->required();
    sweep_cmd->add_option("--T-range", T_range_text, "LO:HI:N, linear")->required();
    sweep_cmd->add_flag("--threshold", with_threshold, "also write the m*(T) curve");
    sweep_cmd->add_option("--out", out);

    auto* stochastic = app.add_subcommand("stochastic", "random season durations, Monte Carlo");
    stochastic->add_option("--net", net_path)->required();
    stochastic->add_option("--m", m)->required();
    stochastic->add_option("--T", T)->required();
    stochastic->add_option("--cycles", cycles);
    stochastic->add_option("--seed", seed);
    stochastic->add_option("--dist", dist_text, "degenerate | uniform:a,b | lognormal:mu,sigma");
    stochastic->add_option("--out", out);

    auto* bound = app.add_subcommand("bound", "best circuit and its growth certificates");
    bound->add_option("--net", net_path)->required();
    auto* m_opt = bound->add_option("--m", m, "evaluate H(m,T) too");
    bound->add_option("--T", T)->required();
    bound->add_option("--theta", theta);
    bound->add_option("--q-max", q_max);
    bound->add_option("--max-walk-len", max_walk_len);
    bound->add_option("--dist", dist_text, "adds the stochastic threshold bound");
    bound->add_option("--epsilon", epsilon);
    bound->add_option("--out", out);

    try {
        app.parse(argc, argv);
        if (simulate->parsed())
            return run_simulate(net_path, m, T, periods, step, x0_text, out);
        if (circuits->parsed()) return run_circuits(net_path, q_max, max_walk_len, max_count, out);
        if (analyze->parsed())
            return run_analyze(net_path, m, T, theta, q_max, max_walk_len, out);
        if (sweep_cmd->parsed())
            return run_sweep(net_path, m_range_text, T_range_text, with_threshold, out);
        if (stochastic->parsed())
            return run_stochastic(net_path, m, T, cycles, seed, dist_text, out);
        if (bound->parsed())
            return run_bound(net_path,
                             m_opt->count() > 0 ? std::optional<double>(m) : std::nullopt, T,
                             theta, q_max, max_walk_len, dist_text, epsilon, out);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const dig::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const dig::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what()
                  << " (last estimate " << e.last_estimate() << ")\n";
        return 3;
    } catch (const dig::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
