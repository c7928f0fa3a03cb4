#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaselab/analytics.hpp"
#include "phaselab/circuit.hpp"
#include "phaselab/entropy.hpp"
#include "phaselab/extractor.hpp"
#include "phaselab/popdyn.hpp"
#include "phaselab/popdyn3.hpp"
#include "phaselab/schmidt.hpp"
#include "phaselab/spoofing.hpp"
#include "phaselab/stabilizer.hpp"
#include "phaselab/statevec.hpp"
#include "phaselab/xeb.hpp"

namespace {

using nlohmann::json;
using namespace phaselab;

constexpr const char* kVersion = "phaselab 1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Manifest written before any output so a run is reproducible from it alone.
void write_manifest(const std::string& out_path, const json& config) {
    json m;
    m["tool"] = kVersion;
    m["config"] = config;
    write_file(out_path + ".manifest.json", m.dump(2) + "\n");
}

std::vector<double> parse_scan(const std::string& text) {
    // "name=start:stop:step" or "start:stop:step"
    const auto eq = text.find('=');
    std::string body = eq == std::string::npos ? text : text.substr(eq + 1);
    double start, stop, step;
    if (std::sscanf(body.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0)
        throw std::invalid_argument("scan must look like start:stop:step, got '" + text + "'");
    std::vector<double> grid;
    for (double v = start; v <= stop + 1e-12; v += step) grid.push_back(v);
    return grid;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

CircuitSpec chain_schedule(int n, int period_T) {
    CircuitSpec spec;
    spec.n = n;
    spec.topology = Topology::chain1d;
    spec.pattern = {"A", "B"};
    if (period_T > 0) spec.weak_link = WeakLink{n / 2, period_T};
    return spec;
}

int cmd_gen(const std::string& spec_path, const std::string& out) {
    const CircuitSpec spec = spec_from_json(read_file(spec_path));
    json cfg;
    cfg["command"] = "gen";
    cfg["spec"] = json::parse(spec_to_json(spec));
    write_manifest(out, cfg);
    write_file(out, circuit_to_json(build_circuit(spec)));
    return 0;
}

int cmd_sim(const std::string& circuit_path, std::size_t samples, std::uint64_t seed, double p1,
            double p2, const std::string& out_samples, const std::string& out_probs,
            const std::string& out_state) {
    const Circuit circuit = circuit_from_json(read_file(circuit_path));
    json cfg;
    cfg["command"] = "sim";
    cfg["circuit"] = circuit_path;
    cfg["samples"] = samples;
    cfg["seed"] = seed;
    cfg["p1"] = p1;
    cfg["p2"] = p2;
    write_manifest(out_samples.empty() ? (out_state.empty() ? out_probs : out_state) : out_samples,
                   cfg);

    const StateVector psi = run_ideal(circuit);
    const auto ideal = probabilities(psi);
    SampleSet set;
    if (p1 > 0 || p2 > 0) {
        NoiseModel noise;
        noise.p1 = p1;
        noise.p2 = p2;
        const DensityMatrix rho = run_depolarizing(circuit, noise);
        set = sample_bitstrings(rho, ideal, samples, seed);
    } else {
        set = sample_bitstrings(ideal, ideal, circuit.n, samples, seed);
    }
    if (!out_state.empty()) write_state(psi, out_state);
    if (!out_samples.empty()) write_samples(set, out_samples);
    if (!out_probs.empty()) {
        std::ostringstream csv;
        csv << "bitstring,p_sim\n";
        for (std::size_t i = 0; i < set.bitstrings.size(); ++i)
            csv << set.bitstrings[i] << ',' << fmt(set.probs[i]) << '\n';
        write_file(out_probs, csv.str());
    }
    return 0;
}

int cmd_popdyn(int n, int period_T, const std::string& topology, int rows, int cols,
               const std::string& scan, const std::string& depths_text, int engine, bool spoof,
               const std::string& out) {
    CircuitSpec spec;
    if (topology == "chain") {
        spec = chain_schedule(n, period_T);
    } else if (topology == "grid") {
        spec.n = n;
        spec.topology = Topology::grid2d;
        spec.rows = rows;
        spec.cols = cols;
        spec.pattern = {"A", "C", "B", "D"};
        if (period_T > 0) spec.weak_link = WeakLink{cols / 2, period_T};
    } else {
        throw std::invalid_argument("topology must be chain or grid");
    }
    const auto grid = parse_scan(scan);
    const auto depths = parse_int_list(depths_text);
    json cfg;
    cfg["command"] = "popdyn";
    cfg["spec"] = json::parse(spec_to_json(spec));
    cfg["eps_n_grid"] = grid;
    cfg["depths"] = depths;
    cfg["engine"] = engine;
    cfg["spoof"] = spoof;
    write_manifest(out, cfg);

    std::ostringstream csv;
    csv << "epsilon_n,d,xeb,theta\n";
    const int d_max = *std::max_element(depths.begin(), depths.end());
    popdyn::OrderParameterScan scan_data;
    scan_data.depths = depths;
    for (double f : grid) {
        popdyn::PopNoise noise;
        noise.epsilon = f / n;
        std::vector<double> trace;
        if (engine == 3)
            trace = popdyn3::evolve(spec, noise, d_max);
        else
            trace = popdyn::evolve(spec, noise, d_max,
                                   spoof ? popdyn::EvolveMode::spoof_omit_cut
                                         : popdyn::EvolveMode::normal);
        scan_data.eps_n.push_back(f);
        scan_data.xeb.emplace_back();
        scan_data.theta.emplace_back();
        for (int d : depths) {
            const double theta = std::exp(-f * d) / trace[std::size_t(d)];
            scan_data.xeb.back().push_back(trace[std::size_t(d)]);
            scan_data.theta.back().push_back(theta);
            csv << fmt(f) << ',' << d << ',' << fmt(trace[std::size_t(d)]) << ',' << fmt(theta)
                << '\n';
        }
    }
    write_file(out, csv.str());
    try {
        const auto crossing = popdyn::crossing_from_scan(scan_data);
        std::cout << "crossing eps_c*n = " << fmt(crossing.mean) << " (spread "
                  << fmt(crossing.spread) << ", pairs " << crossing.per_pair.size() << ")\n";
    } catch (const std::exception& e) {
        std::cout << "crossing: " << e.what() << "\n";
    }
    return 0;
}

int cmd_phase(int dim, double n, const std::string& scan, const std::string& alphas_text,
              const std::string& boundary_text, const std::string& out) {
    const auto fs = parse_scan(scan);
    std::vector<double> alphas;
    for (const auto a : parse_scan(alphas_text)) alphas.push_back(a);
    analytics::Boundary boundary = analytics::Boundary::none;
    if (boundary_text == "regular") boundary = analytics::Boundary::regular_r3;
    else if (boundary_text == "sycamore") boundary = analytics::Boundary::sycamore_r2;
    else if (boundary_text != "none") throw std::invalid_argument("boundary: none|regular|sycamore");
    json cfg;
    cfg["command"] = "phase";
    cfg["dim"] = dim;
    cfg["n"] = n;
    cfg["f_grid"] = fs;
    cfg["alphas"] = alphas;
    cfg["boundary"] = boundary_text;
    write_manifest(out, cfg);

    std::ostringstream csv;
    csv << "f,alpha,xeb,region\n";
    for (double alpha : alphas)
        for (double f : fs) {
            analytics::PhasePoint p;
            p.n = n;
            p.dimension = dim;
            p.boundary = boundary;
            p.epsilon = f / n;
            p.d = alpha * (dim == 1 ? std::log2(n) : std::log2(n) / 2.0);
            const auto c = analytics::phase_classify(p);
            const double xeb = dim == 1 ? analytics::xeb_1d(n, p.d, p.epsilon)
                                        : analytics::xeb_2d(n, p.d, p.epsilon, boundary);
            csv << fmt(f) << ',' << fmt(alpha) << ',' << fmt(xeb) << ','
                << analytics::region_name(c.region) << '\n';
        }
    write_file(out, csv.str());
    return 0;
}

int cmd_xeb(const std::string& samples_path, const std::string& probs_path, int n,
            const std::string& estimator, double t, int hamming_threshold, int rounds) {
    const auto strings = read_samples(samples_path, n);
    SampleSet set;
    set.n = n;
    set.bitstrings = strings;
    // probabilities sidecar: CSV "bitstring,p_sim" or one float per line
    std::ifstream f(probs_path);
    if (!f) throw std::invalid_argument("cannot open " + probs_path);
    std::string line;
    std::vector<double> probs;
    while (std::getline(f, line)) {
        if (line.empty() || line.rfind("bitstring", 0) == 0) continue;
        const auto comma = line.find(',');
        probs.push_back(std::stod(comma == std::string::npos ? line : line.substr(comma + 1)));
    }
    if (probs.size() != strings.size())
        throw std::invalid_argument("probability sidecar length mismatch");
    set.probs = probs;

    if (estimator == "linear") {
        const auto est = xeb::linear_xeb(set);
        std::cout << "linear_xeb " << fmt(est.value) << " +- " << fmt(est.stderr_mean) << "\n";
    } else if (estimator == "log") {
        const auto est = xeb::log_xeb(set);
        std::cout << "log_xeb " << fmt(est.value) << " +- " << fmt(est.stderr_mean) << "\n";
    } else if (estimator == "txeb") {
        const auto est = xeb::truncated_xeb(set, xeb::TxebParams{t});
        std::cout << "txeb " << fmt(est.txeb) << " fidelity " << fmt(est.fidelity) << " +- "
                  << fmt(est.stderr_f) << (est.low_t_warning ? " (warning: t < 2)" : "") << "\n";
    } else if (estimator == "hamming") {
        xeb::HammingFilterParams params;
        params.threshold = hamming_threshold;
        params.bootstrap_rounds = rounds;
        const auto res = xeb::hamming_filter(set, params);
        std::cout << "hamming_filter kept " << res.kept.front().size() << "/" << set.bitstrings.size()
                  << " xeb " << fmt(res.mean_xeb.value) << " +- " << fmt(res.mean_xeb.stderr_mean)
                  << "\n";
    } else if (estimator == "pt") {
        const auto rep = xeb::porter_thomas_checks(set);
        std::cout << "ks_stat " << fmt(rep.ks_stat) << " p " << fmt(rep.ks_pvalue) << " mean_dp "
                  << fmt(rep.mean_dp) << "\n";
    } else {
        throw std::invalid_argument("estimator: linear|log|txeb|hamming|pt");
    }
    return 0;
}

int cmd_spoof(double dl_qubits, double dr_qubits, double k, double log_lambda, double depth,
              double n_sup) {
    spoofing::SpoofScenario sc;
    sc.dim_left = std::exp2(dl_qubits);
    sc.dim_right = std::exp2(dr_qubits);
    sc.k_left = std::sqrt(k);
    sc.k_right = std::sqrt(k);
    sc.log_lambda = log_lambda;
    sc.depth = depth;
    sc.n_superposition = n_sup;
    const auto lin = spoofing::spoof_linear_bound(sc);
    std::cout << "linear bound " << fmt(lin.bound) << " (optimal split k_L=" << fmt(lin.k_left_opt)
              << " bound " << fmt(lin.bound_at_opt) << ")\n";
    std::cout << "log bound " << fmt(spoofing::spoof_log_bound(sc)) << "\n";
    return 0;
}

int cmd_entropy(double fidelity, double k, int n, double c1, double c2, double s) {
    entropy::EntropyParams p;
    p.fidelity = fidelity;
    p.k_samples = k;
    p.n_qubits = n;
    p.c1 = c1;
    p.c2 = c2;
    p.s_oversample = s;
    std::cout << entropy::report_json(p) << "\n";
    return 0;
}

int cmd_extract(const std::string& in_path, double k_bits, std::size_t m, double eps,
                const std::string& seed_spec, const std::string& out_path) {
    std::ifstream f(in_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open " + in_path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    const auto input = extractor::BitVec::from_bytes(bytes, bytes.size() * 8);
    const auto plan = extractor::plan_trevisan(input.nbits, m, eps);
    extractor::BitVec seed;
    if (seed_spec == "os") {
        std::ifstream urandom("/dev/urandom", std::ios::binary);
        std::vector<std::uint8_t> sb((plan.seed_bits() + 7) / 8);
        urandom.read(reinterpret_cast<char*>(sb.data()), std::streamsize(sb.size()));
        seed = extractor::BitVec::from_bytes(sb, plan.seed_bits());
    } else {
        std::ifstream sf(seed_spec, std::ios::binary);
        if (!sf) throw std::invalid_argument("cannot open seed file " + seed_spec);
        std::vector<std::uint8_t> sb((std::istreambuf_iterator<char>(sf)),
                                     std::istreambuf_iterator<char>());
        seed = extractor::BitVec::from_bytes(sb, plan.seed_bits());
    }
    json cfg;
    cfg["command"] = "extract";
    cfg["input"] = in_path;
    cfg["input_bits"] = input.nbits;
    cfg["k_bits"] = k_bits;
    cfg["m"] = m;
    cfg["eps"] = eps;
    cfg["entropy_required_bits"] = plan.entropy_required_bits;
    cfg["seed_bits"] = plan.seed_bits();
    cfg["seed_source"] = seed_spec;
    write_manifest(out_path, cfg);
    const auto out_bits = extractor::trevisan_extract(input, plan, seed, k_bits);
    const auto out_bytes = out_bits.to_bytes();
    std::ofstream of(out_path, std::ios::binary);
    of.write(reinterpret_cast<const char*>(out_bytes.data()), std::streamsize(out_bytes.size()));
    std::cout << "extracted " << out_bits.nbits << " bits\n";
    return 0;
}

int cmd_schmidt(int n, int depth, std::size_t chi, int circuits, std::uint64_t seed,
                const std::string& out) {
    json cfg;
    cfg["command"] = "schmidt";
    cfg["n"] = n;
    cfg["depth"] = depth;
    cfg["chi"] = chi;
    cfg["circuits"] = circuits;
    cfg["seed"] = seed;
    write_manifest(out, cfg);
    std::ostringstream csv;
    csv << "n,d,chi,purity,bound_jensen,bound_haar,true_F,xeb\n";
    for (int i = 0; i < circuits; ++i) {
        CircuitSpec spec = chain_schedule(n, 0);
        spec.gate_ensemble = GateEnsemble::discrete_zxz;
        spec.depth_cycles = depth;
        spec.seed = Rng(seed).substream(i).next_u64();
        const auto psi = run_ideal(build_circuit(spec));
        const auto spectrum = schmidt::schmidt_decompose(psi, n / 2);
        const auto bound = schmidt::fidelity_bound(spectrum, chi);
        const auto tx = schmidt::truncated_state_xeb(psi, n / 2, chi);
        csv << n << ',' << depth << ',' << chi << ',' << fmt(spectrum.purity()) << ','
            << fmt(bound.jensen) << ',' << fmt(bound.haar) << ',' << fmt(tx.true_f) << ','
            << fmt(tx.xeb) << '\n';
    }
    write_file(out, csv.str());
    return 0;
}

int cmd_recipe(const std::string& name, const std::string& out_dir, std::uint64_t seed);

int run(int argc, char** argv) {
    CLI::App app{"phaselab: noisy random-circuit-sampling laboratory"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a circuit from a spec file");
    std::string spec_path, out_path = "circuit.json";
    gen->add_option("--spec", spec_path, "circuit spec JSON")->required();
    gen->add_option("--out", out_path, "output circuit JSON");

    // sim
    auto* sim = app.add_subcommand("sim", "simulate a circuit and sample bitstrings");
    std::string circuit_path, out_samples, out_probs, out_state;
    std::size_t sample_count = 1000;
    std::uint64_t seed = 1;
    double p1 = 0, p2 = 0;
    sim->add_option("--circuit", circuit_path)->required();
    sim->add_option("--samples", sample_count);
    sim->add_option("--seed", seed);
    sim->add_option("--p1", p1, "single-qubit depolarizing rate per cycle");
    sim->add_option("--p2", p2, "two-qubit depolarizing rate per gate");
    sim->add_option("--out-samples", out_samples);
    sim->add_option("--out-probs", out_probs);
    sim->add_option("--out-state", out_state);

    // popdyn
    auto* pd = app.add_subcommand("popdyn", "ensemble-average XEB via the invariant chain");
    int pd_n = 12, pd_T = 0, pd_rows = 0, pd_cols = 0, pd_engine = 2;
    std::string pd_topology = "chain", pd_scan = "eps=0:1.4:0.05", pd_depths = "12,24,36";
    std::string pd_out = "popdyn.csv";
    bool pd_spoof = false;
    pd->add_option("--topology", pd_topology);
    pd->add_option("--n", pd_n);
    pd->add_option("--rows", pd_rows);
    pd->add_option("--cols", pd_cols);
    pd->add_option("--T", pd_T, "weak-link period (0: none)");
    pd->add_option("--scan", pd_scan, "eps_n grid start:stop:step");
    pd->add_option("--depths", pd_depths);
    pd->add_option("--engine", pd_engine, "2: Haar two-state, 3: discrete three-state");
    pd->add_flag("--spoof", pd_spoof, "omit the weak-link entangler (sector model)");
    pd->add_option("--out", pd_out);

    // phase
    auto* ph = app.add_subcommand("phase", "closed-form phase diagram tables");
    int ph_dim = 1;
    double ph_n = 18;
    std::string ph_scan = "f=0:1.4:0.02", ph_alphas = "1.2:3:0.2", ph_boundary = "none";
    std::string ph_out = "phase.csv";
    ph->add_option("--dim", ph_dim);
    ph->add_option("--n", ph_n);
    ph->add_option("--scan", ph_scan);
    ph->add_option("--alpha", ph_alphas);
    ph->add_option("--boundary", ph_boundary);
    ph->add_option("--out", ph_out);

    // xeb
    auto* xb = app.add_subcommand("xeb", "estimators over a sample file");
    std::string xb_samples, xb_probs, xb_estimator = "linear";
    int xb_n = 0, xb_threshold = 15, xb_rounds = 16;
    double xb_t = 4.0;
    xb->add_option("--samples", xb_samples)->required();
    xb->add_option("--probs", xb_probs)->required();
    xb->add_option("--n", xb_n)->required();
    xb->add_option("--estimator", xb_estimator);
    xb->add_option("--t", xb_t);
    xb->add_option("--hamming-threshold", xb_threshold);
    xb->add_option("--rounds", xb_rounds);

    // spoof
    auto* sp = app.add_subcommand("spoof", "spoofing bounds");
    double sp_dl = 35, sp_dr = 35, sp_k = 1e6, sp_lambda = -1.95, sp_d = 24, sp_nsup = 1;
    sp->add_option("--dl", sp_dl, "left subsystem qubits");
    sp->add_option("--dr", sp_dr, "right subsystem qubits");
    sp->add_option("--k", sp_k, "total selected bitstrings");
    sp->add_option("--lambda", sp_lambda, "log decay rate per cycle");
    sp->add_option("--d", sp_d, "depth");
    sp->add_option("--nsup", sp_nsup, "superposition terms N");

    // entropy
    auto* en = app.add_subcommand("entropy", "min-entropy accounting report");
    double en_f = 1e-3, en_k = 1e6, en_c1 = 5, en_c2 = 5, en_s = 1;
    int en_n = 67;
    en->add_option("--f", en_f);
    en->add_option("--k", en_k);
    en->add_option("--n", en_n);
    en->add_option("--c1", en_c1);
    en->add_option("--c2", en_c2);
    en->add_option("--s", en_s);

    // extract
    auto* ex = app.add_subcommand("extract", "seeded randomness extraction");
    std::string ex_in, ex_seed = "os", ex_out = "rand.bin";
    double ex_kbits = 0, ex_eps = 1e-6;
    std::size_t ex_m = 4096;
    ex->add_option("--in", ex_in)->required();
    ex->add_option("--k-bits", ex_kbits, "claimed min-entropy of the input")->required();
    ex->add_option("--m", ex_m, "output bits");
    ex->add_option("--eps", ex_eps);
    ex->add_option("--seed", ex_seed, "seed file, or 'os' for /dev/urandom");
    ex->add_option("--out", ex_out);

    // schmidt
    auto* sc = app.add_subcommand("schmidt", "Schmidt spectra and truncation bounds");
    int sc_n = 16, sc_depth = 20, sc_circuits = 20;
    std::size_t sc_chi = 16;
    std::uint64_t sc_seed = 1;
    std::string sc_out = "schmidt.csv";
    sc->add_option("--n", sc_n);
    sc->add_option("--depth", sc_depth);
    sc->add_option("--chi", sc_chi);
    sc->add_option("--circuits", sc_circuits);
    sc->add_option("--seed", sc_seed);
    sc->add_option("--out", sc_out);

    // recipe
    auto* rc = app.add_subcommand("recipe", "orchestrated multi-step runs");
    std::string rc_name, rc_dir = "recipe_out";
    std::uint64_t rc_seed = 1;
    rc->add_option("name", rc_name, "weaklink-transition | dynamical-crossing | clifford-lambda | spoof-budget | randomness-pipeline")
        ->required();
    rc->add_option("--out-dir", rc_dir);
    rc->add_option("--seed", rc_seed);

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) return cmd_gen(spec_path, out_path);
    if (sim->parsed())
        return cmd_sim(circuit_path, sample_count, seed, p1, p2, out_samples, out_probs, out_state);
    if (pd->parsed())
        return cmd_popdyn(pd_n, pd_T, pd_topology, pd_rows, pd_cols, pd_scan, pd_depths, pd_engine,
                          pd_spoof, pd_out);
    if (ph->parsed()) return cmd_phase(ph_dim, ph_n, ph_scan, ph_alphas, ph_boundary, ph_out);
    if (xb->parsed())
        return cmd_xeb(xb_samples, xb_probs, xb_n, xb_estimator, xb_t, xb_threshold, xb_rounds);
    if (sp->parsed()) return cmd_spoof(sp_dl, sp_dr, sp_k, sp_lambda, sp_d, sp_nsup);
    if (en->parsed()) return cmd_entropy(en_f, en_k, en_n, en_c1, en_c2, en_s);
    if (ex->parsed()) return cmd_extract(ex_in, ex_kbits, ex_m, ex_eps, ex_seed, ex_out);
    if (sc->parsed()) return cmd_schmidt(sc_n, sc_depth, sc_chi, sc_circuits, sc_seed, sc_out);
    if (rc->parsed()) return cmd_recipe(rc_name, rc_dir, rc_seed);
    return 2;
}

int cmd_recipe(const std::string& name, const std::string& out_dir, std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    const auto path = [&](const std::string& f) { return out_dir + "/" + f; };
    json cfg;
    cfg["command"] = "recipe";
    cfg["name"] = name;
    cfg["seed"] = seed;

    if (name == "weaklink-transition") {
        write_manifest(path("weaklink"), cfg);
        std::ostringstream csv;
        csv << "T,crossing_eps_n,spread,predicted_ln16_over_T\n";
        for (int period : {6, 8}) {
            CircuitSpec spec = chain_schedule(12, period);
            std::vector<double> grid;
            for (double f = 0.05; f <= 1.4; f += 0.02) grid.push_back(f);
            const std::vector<int> depths = {4 * period, 6 * period, 8 * period};
            const auto scan = popdyn::order_parameter_scan(spec, grid, depths);
            const auto crossing = popdyn::crossing_from_scan(scan);
            csv << period << ',' << fmt(crossing.mean) << ',' << fmt(crossing.spread) << ','
                << fmt(std::log(16.0) / period) << '\n';
        }
        write_file(path("weaklink.csv"), csv.str());
        std::cout << read_file(path("weaklink.csv"));
        return 0;
    }
    if (name == "dynamical-crossing") {
        write_manifest(path("dyncross"), cfg);
        std::ostringstream csv;
        csv << "n,d,xeb\n";
        const double eps = 0.01;
        for (int n : {8, 10, 12, 14, 16}) {
            CircuitSpec spec = chain_schedule(n, 0);
            popdyn::PopNoise noise;
            noise.epsilon = eps;
            const auto trace = popdyn::evolve(spec, noise, 12);
            for (int d = 0; d <= 12; ++d) csv << n << ',' << d << ',' << fmt(trace[d]) << '\n';
        }
        write_file(path("dyncross.csv"), csv.str());
        std::cout << "wrote " << path("dyncross.csv") << "\n";
        return 0;
    }
    if (name == "clifford-lambda") {
        write_manifest(path("clifford"), cfg);
        std::vector<CircuitSpec> shapes;
        for (int side : {4, 5}) {
            CircuitSpec spec;
            spec.n = side * side;
            spec.topology = Topology::grid2d;
            spec.rows = side;
            spec.cols = side;
            spec.pattern = {"A", "B", "C", "D", "C", "D", "A", "B"};
            shapes.push_back(spec);
        }
        const auto table = stabilizer::clifford_xeb_decay(shapes, {1, 2, 3, 4}, 20000, seed);
        std::ostringstream csv;
        csv << "n,d,xeb,stderr,floor\n";
        for (const auto& p : table.points)
            csv << p.n << ',' << p.d << ',' << fmt(p.xeb) << ',' << fmt(p.stderr_mean) << ','
                << fmt(p.floor_) << '\n';
        write_file(path("clifford.csv"), csv.str());
        const auto fit = spoofing::fit_lambda_from_clifford(table);
        std::cout << "ln lambda = " << fmt(fit.log_lambda) << " +- " << fmt(fit.stderr_slope)
                  << " (" << fit.points_used << " points)\n";
        return 0;
    }
    if (name == "spoof-budget") {
        write_manifest(path("spoof"), cfg);
        spoofing::SpoofScenario sc;
        sc.dim_left = std::exp2(35);
        sc.dim_right = std::exp2(35);
        sc.k_left = sc.k_right = 1e3;
        sc.log_lambda = -1.95;
        sc.depth = 24;
        const auto lin = spoofing::spoof_linear_bound(sc);
        json out;
        out["linear_bound"] = lin.bound;
        out["optimal_bound"] = lin.bound_at_opt;
        out["log_bound"] = spoofing::spoof_log_bound(sc);
        out["cut_contribution_nu2"] = spoofing::cut_contribution(2, sc.depth);
        write_file(path("spoof.json"), out.dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    if (name == "randomness-pipeline") {
        write_manifest(path("pipeline"), cfg);
        // synthetic full-fidelity Porter-Thomas source at n = 16
        CircuitSpec spec = chain_schedule(16, 0);
        spec.gate_ensemble = GateEnsemble::discrete_zxz;
        spec.depth_cycles = 24;
        spec.seed = seed;
        const auto psi = run_ideal(build_circuit(spec));
        const auto samples = sample_bitstrings(psi, 4000, seed + 1);
        entropy::EntropyParams p;
        p.fidelity = 1.0;
        p.k_samples = double(samples.bitstrings.size());
        p.n_qubits = 16;
        p.c1 = 0;  // F = 1: no binomial spread to subtract
        p.c2 = 5;
        const auto bound = entropy::smooth_min_entropy(p);
        const auto result = extractor::pipeline(samples, bound.bound, 1e-6, seed + 2);
        write_file(path("audit.json"), result.audit_json + "\n");
        const auto bytes = result.bits.to_bytes();
        std::ofstream bin(path("rand.bin"), std::ios::binary);
        bin.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
        std::cout << "entropy bound " << fmt(bound.bound) << " bits -> extracted "
                  << result.bits.nbits << " bits\n";
        return 0;
    }
    throw std::invalid_argument(
        "unknown recipe '" + name +
        "'; available: weaklink-transition, dynamical-crossing, clifford-lambda, spoof-budget, "
        "randomness-pipeline");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
