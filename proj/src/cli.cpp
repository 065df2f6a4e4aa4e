#include "loewner/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "loewner/analysis.hpp"
#include "loewner/flow.hpp"
#include "loewner/json_io.hpp"
#include "loewner/mminus.hpp"
#include "loewner/sampling.hpp"
#include "loewner/series.hpp"
#include "loewner/shear.hpp"

namespace loewner::cli {

namespace {

struct Options {
    std::string in_path;
    std::string out_path;
    std::uint64_t seed = 0;
    double tol = std::numeric_limits<double>::quiet_NaN();  // NaN = use default
    std::string format = "json";
    int degree = -1;                                        // -1 = use default
    double s = std::numeric_limits<double>::quiet_NaN();
    double t = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> a;                                  // --a RE IM
    std::string kind;
    double r = 0.999;
    double step = std::numeric_limits<double>::quiet_NaN();
    bool chain = false;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(Complex c) { return "(" + fmt(c.real()) + "," + fmt(c.imag()) + ")"; }

std::string fmt(const Point2& z) { return fmt(z.z1) + " " + fmt(z.z2); }

// Report envelope: {"config": {...}, "report": {...}}; the inner report
// object keeps the exact documented shape of the library type.
std::string dump_envelope(const OrderedJson& config, const OrderedJson& report) {
    OrderedJson j;
    j["config"] = config;
    j["report"] = report;
    return j.dump(2) + "\n";
}

std::string config_text(const OrderedJson& config) {
    std::string out;
    for (const auto& [key, value] : config.items()) {
        out += "# " + key + ": ";
        out += value.is_string() ? value.get<std::string>() : value.dump();
        out += "\n";
    }
    return out;
}

std::string membership_text(const MembershipReport& r) {
    std::string out;
    out += std::string("verdict: ") + r.verdict() + "\n";
    out += "max_defect: " + fmt(r.max_defect) + "\n";
    out += "witness: " + fmt(r.witness) + "\n";
    out += "samples_used: " + std::to_string(r.samples_used) + "\n";
    out += "seed: " + std::to_string(r.seed) + "\n";
    return out;
}

std::string starlike_text(const StarlikeReport& r) {
    std::string out;
    out += std::string("verdict: ") + r.verdict() + "\n";
    out += "min_margin: " + fmt(r.min_margin) + "\n";
    out += "witness: " + fmt(r.witness) + "\n";
    out += "samples_used: " + std::to_string(r.samples_used) + "\n";
    out += "seed: " + std::to_string(r.seed) + "\n";
    return out;
}

void deliver(const Options& opt, std::ostream& out, const std::string& payload) {
    if (!opt.out_path.empty())
        write_text_file(opt.out_path, payload);
    else
        out << payload;
}

SamplingConfig sampling_config(const Options& opt) {
    SamplingConfig cfg;
    cfg.rng_seed = opt.seed;
    if (!std::isnan(opt.tol)) cfg.defect_tolerance = opt.tol;
    return cfg;
}

OrderedJson sampling_config_json(const char* subcommand, const Options& opt,
                                 const SamplingConfig& cfg) {
    OrderedJson c;
    c["subcommand"] = subcommand;
    c["in"] = opt.in_path;
    c["out"] = opt.out_path;
    c["seed"] = cfg.rng_seed;
    c["tol"] = cfg.defect_tolerance;
    c["format"] = opt.format;
    c["grid_radii"] = cfg.grid_radii;
    c["grid_angles"] = cfg.grid_angles;
    c["random_samples"] = cfg.random_samples;
    return c;
}

// --- subcommand handlers --------------------------------------------------

int run_check_mminus(const Options& opt, std::ostream& out) {
    const SamplingConfig cfg = sampling_config(opt);
    const OrderedJson config = sampling_config_json("check-mminus", opt, cfg);
    const MembershipReport rep = check_mminus(read_series_file(opt.in_path), cfg);
    deliver(opt, out,
            opt.format == "json" ? dump_envelope(config, membership_to_json(rep))
                                 : config_text(config) + membership_text(rep));
    return rep.accepted ? 0 : 1;
}

int run_starlike(const Options& opt, std::ostream& out) {
    const SamplingConfig cfg = sampling_config(opt);
    const OrderedJson config = sampling_config_json("starlike", opt, cfg);
    const StarlikeReport rep = check_starlike(read_series_file(opt.in_path), cfg);
    deliver(opt, out,
            opt.format == "json" ? dump_envelope(config, starlike_to_json(rep))
                                 : config_text(config) + starlike_text(rep));
    return rep.accepted ? 0 : 1;
}

int run_growth(const Options& opt, std::ostream& out) {
    const SamplingConfig cfg = sampling_config(opt);
    const OrderedJson config = sampling_config_json("growth", opt, cfg);
    const MembershipReport rep = growth_check(read_series_file(opt.in_path), cfg);
    deliver(opt, out,
            opt.format == "json" ? dump_envelope(config, membership_to_json(rep))
                                 : config_text(config) + membership_text(rep));
    return rep.accepted ? 0 : 1;
}

int run_shear(const Options& opt, std::ostream& out) {
    const double tol = std::isnan(opt.tol) ? 1e-12 : opt.tol;
    OrderedJson config;
    config["subcommand"] = "shear";
    config["in"] = opt.in_path;
    config["out"] = opt.out_path;
    config["tol"] = tol;
    config["format"] = opt.format;

    const PowerSeriesMap2 f = read_series_file(opt.in_path);
    const ShearMap s = shear_of(f, tol);
    const PowerSeriesMap2 sheared = shear_to_series(s, f.trunc_degree());

    OrderedJson report;
    report["shear"] = shear_to_json(s);
    if (!opt.out_path.empty()) {
        // The output file is a plain series file; the run report goes to
        // standard output so the effective config is still echoed.
        write_text_file(opt.out_path, series_to_json(sheared).dump(2) + "\n");
    } else {
        report["series"] = series_to_json(sheared);
    }
    if (opt.format == "json") {
        out << dump_envelope(config, report);
    } else {
        out << config_text(config) << "lambda: " << fmt(s.lambda) << "\nmu: " << fmt(s.mu)
            << "\nA: " << fmt(s.A) << "\n";
    }
    return 0;
}

int run_bound(const Options& opt, std::ostream& out) {
    OrderedJson config;
    config["subcommand"] = "bound";
    config["out"] = opt.out_path;
    config["format"] = opt.format;
    config["bruteforce_spacing"] = 1e-4;

    const BoundResult golden = sharp_shear_bound();
    const BoundResult brute = sharp_shear_bound_bruteforce(1e-4);
    const double agreement = std::abs(golden.bound - brute.bound);
    const bool ok = agreement <= 1e-6;

    OrderedJson report;
    report["bound"] = golden.bound;
    report["direction"] = OrderedJson::array({golden.direction_x, golden.direction_y});
    report["bruteforce_bound"] = brute.bound;
    report["bruteforce_direction"] =
        OrderedJson::array({brute.direction_x, brute.direction_y});
    report["agreement"] = agreement;
    report["agreement_ok"] = ok;

    std::string text = config_text(config);
    text += "bound: " + fmt(golden.bound) + "\n";
    text += "direction: " + fmt(golden.direction_x) + " " + fmt(golden.direction_y) + "\n";
    text += "bruteforce_bound: " + fmt(brute.bound) + "\n";
    text += "agreement: " + fmt(agreement) + (ok ? " (ok)\n" : " (MISMATCH)\n");
    deliver(opt, out, opt.format == "json" ? dump_envelope(config, report) : text);
    return ok ? 0 : 1;
}

HerglotzField field_from_input(const std::string& path, int trunc_for_profiles) {
    const nlohmann::json j = read_json_file(path);
    if (j.is_array()) return shear_field_from_profile(qprofile_from_json(j), trunc_for_profiles);
    return HerglotzField::constant(series_from_json(j));
}

int run_evolve(const Options& opt, std::ostream& out) {
    const double tol = std::isnan(opt.tol) ? 1e-10 : opt.tol;
    const double s = std::isnan(opt.s) ? 0.0 : opt.s;

    const HerglotzField field = field_from_input(opt.in_path, 8);
    const int degree = opt.degree < 0 ? std::min(4, field.trunc_degree()) : opt.degree;

    double t = opt.t;
    if (opt.chain && std::isnan(t)) t = s + 20.0;
    if (std::isnan(t))
        throw std::invalid_argument("evolve: --t is required (or pass --chain for the limit)");

    OrderedJson config;
    config["subcommand"] = "evolve";
    config["in"] = opt.in_path;
    config["out"] = opt.out_path;
    config["tol"] = tol;
    config["format"] = opt.format;
    config["degree"] = degree;
    config["s"] = s;
    config["t"] = t;
    config["chain"] = opt.chain;

    PowerSeriesMap2 fitted = PowerSeriesMap2::zero(1);
    if (opt.chain) {
        fitted = recover_chain_map(field, s, t, degree);
    } else {
        TransitionMap tm(field, s, t, tol);
        fitted = tm.recover(degree);
    }

    // Diagnostics: the three shear coefficients and the largest coefficient
    // outside the shear shape.
    const ShearMap shear_part = shear_of(fitted, 1e-6);
    double off_shear = 0.0;
    for (int comp = 1; comp <= 2; ++comp)
        for (const auto& term : fitted.component(comp)) {
            const bool shear_slot = (comp == 1 && term.index == MultiIndex{1, 0}) ||
                                    (comp == 1 && term.index == MultiIndex{0, 2}) ||
                                    (comp == 2 && term.index == MultiIndex{0, 1});
            if (!shear_slot) off_shear = std::max(off_shear, std::abs(term.value));
        }

    OrderedJson report;
    report["mode"] = opt.chain ? "chain" : "transition";
    report["shear_part"] = shear_to_json(shear_part);
    report["max_off_shear"] = off_shear;
    if (!opt.out_path.empty())
        write_text_file(opt.out_path, series_to_json(fitted).dump(2) + "\n");
    else
        report["series"] = series_to_json(fitted);

    if (opt.format == "json") {
        out << dump_envelope(config, report);
    } else {
        out << config_text(config) << "mode: " << (opt.chain ? "chain" : "transition")
            << "\nlambda: " << fmt(shear_part.lambda) << "\nmu: " << fmt(shear_part.mu)
            << "\nA: " << fmt(shear_part.A) << "\nmax_off_shear: " << fmt(off_shear) << "\n";
    }
    return 0;
}

int run_flow(const Options& opt, std::ostream& out) {
    const double s = std::isnan(opt.s) ? 0.0 : opt.s;
    if (std::isnan(opt.t)) throw std::invalid_argument("flow: --t is required");
    if (!opt.in_path.empty() && !opt.a.empty())
        throw std::invalid_argument("flow: pass either --in PROFILE or --a RE IM, not both");

    QProfile q = QProfile::constant(kExtremalShearCoefficient);
    if (!opt.in_path.empty())
        q = qprofile_from_json(read_json_file(opt.in_path));
    else if (!opt.a.empty())
        q = QProfile::constant({opt.a[0], opt.a[1]});

    OrderedJson config;
    config["subcommand"] = "flow";
    config["in"] = opt.in_path;
    config["out"] = opt.out_path;
    config["format"] = opt.format;
    config["s"] = s;
    config["t"] = opt.t;
    config["q_profile"] = q.describe();

    const CoefficientFlow cf = shear_coefficient_flow(q, s, opt.t);
    const double env = envelope_bound(s, opt.t);

    OrderedJson report = coefficient_flow_to_json(cf);
    report["abs_a"] = std::abs(cf.a_st);
    report["envelope"] = env;
    report["within_envelope"] = std::abs(cf.a_st) <= env + 1e-9;

    std::string text = config_text(config);
    text += "a_st: " + fmt(cf.a_st) + "\n";
    text += "abs_a: " + fmt(std::abs(cf.a_st)) + "\n";
    text += "envelope: " + fmt(env) + "\n";
    deliver(opt, out, opt.format == "json" ? dump_envelope(config, report) : text);
    return 0;
}

int run_reproduce(const Options& opt, std::ostream& out) {
    const SamplingConfig cfg = sampling_config(opt);
    OrderedJson config = sampling_config_json("reproduce", opt, cfg);

    const PowerSeriesMap2 candidate = opt.in_path.empty()
                                          ? shear_series(kExtremalShearCoefficient)
                                          : read_series_file(opt.in_path);
    const ReproductionReport rep = reproduce_extremal_bound(cfg, candidate);
    deliver(opt, out,
            opt.format == "json" ? dump_envelope(config, reproduction_to_json(rep))
                                 : config_text(config) + render_text(rep));
    return rep.all_ok() ? 0 : 1;
}

int run_plot(const Options& opt, std::ostream& out) {
    const double s = std::isnan(opt.s) ? 0.0 : opt.s;
    const Complex a = opt.a.empty() ? Complex{kExtremalShearCoefficient}
                                    : Complex{opt.a[0], opt.a[1]};

    OrderedJson config;
    config["subcommand"] = "plot";
    config["kind"] = opt.kind;
    config["out"] = opt.out_path;

    std::string csv;
    auto add_row = [&csv](std::initializer_list<double> cells) {
        bool first = true;
        for (double c : cells) {
            if (!first) csv += ",";
            csv += fmt(c);
            first = false;
        }
        csv += "\n";
    };

    if (opt.kind == "envelope") {
        const double t = std::isnan(opt.t) ? 10.0 : opt.t;
        const double step = std::isnan(opt.step) ? 0.01 : opt.step;
        if (!(step > 0.0) || !(t > s))
            throw std::invalid_argument("plot envelope: need t > s and step > 0");
        config["s"] = s;
        config["t"] = t;
        config["step"] = step;
        csv = "# config: " + config.dump() + "\n";
        csv += "t,envelope,exp_t_envelope\n";
        const long long rows = static_cast<long long>(std::floor((t - s) / step + 1e-9)) + 1;
        for (long long k = 0; k < rows; ++k) {
            const double tk = s + static_cast<double>(k) * step;
            const double env = envelope_bound(s, tk);
            add_row({tk, env, std::exp(tk) * env});
        }
    } else if (opt.kind == "defect-slice") {
        const double r = opt.r;
        const double step = std::isnan(opt.step) ? 0.001 : opt.step;
        if (!(r > 0.0) || r >= 1.0 || !(step > 0.0))
            throw std::invalid_argument("plot defect-slice: need 0 < r < 1 and step > 0");
        config["a"] = complex_to_json(a);
        config["r"] = r;
        config["step"] = step;
        csv = "# config: " + config.dump() + "\n";
        csv += "x,defect\n";
        const double mod_a = std::abs(a);
        const long long rows = static_cast<long long>(std::floor(r / step + 1e-9)) + 1;
        for (long long k = 0; k < rows; ++k) {
            const double x = static_cast<double>(k) * step;
            const double y2 = r * r - x * x;
            add_row({x, -r * r + mod_a * x * y2});
        }
    } else {  // flow-trajectory
        const double t = std::isnan(opt.t) ? 10.0 : opt.t;
        const double step = std::isnan(opt.step) ? 0.01 : opt.step;
        if (!(step > 0.0) || !(t > s))
            throw std::invalid_argument("plot flow-trajectory: need t > s and step > 0");
        const QProfile q = QProfile::constant(a);
        config["a"] = complex_to_json(a);
        config["s"] = s;
        config["t"] = t;
        config["step"] = step;
        csv = "# config: " + config.dump() + "\n";
        csv += "t,re_a,im_a,abs_a,envelope\n";
        const long long rows = static_cast<long long>(std::floor((t - s) / step + 1e-9)) + 1;
        for (long long k = 0; k < rows; ++k) {
            const double tk = s + static_cast<double>(k) * step;
            const Complex ak = k == 0 ? Complex{0.0} : shear_coefficient_flow(q, s, tk).a_st;
            add_row({tk, ak.real(), ak.imag(), std::abs(ak), envelope_bound(s, tk)});
        }
    }

    deliver(opt, out, csv);
    return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Loewner chain shearing toolkit for the unit ball of C^2", "loewner"};
    app.require_subcommand(1);

    auto add_io = [&opt](CLI::App* sub, bool in_required) {
        auto* in = sub->add_option("--in", opt.in_path, "input JSON file");
        if (in_required) in->required();
        sub->add_option("--out", opt.out_path, "write the result here instead of stdout");
        sub->add_option("--format", opt.format, "output format (default json)")
            ->check(CLI::IsMember({"json", "text"}));
    };
    auto add_sampling = [&opt](CLI::App* sub) {
        sub->add_option("--seed", opt.seed, "random sampling seed (default 0)");
        sub->add_option("--tol", opt.tol, "defect tolerance (default 1e-12)");
    };

    CLI::App* c_mminus = app.add_subcommand(
        "check-mminus", "test a field for dissipative-class membership by sampling");
    add_io(c_mminus, true);
    add_sampling(c_mminus);

    CLI::App* c_shear = app.add_subcommand("shear", "extract the shear of a series map");
    add_io(c_shear, true);
    c_shear->add_option("--tol", opt.tol, "shear-shape tolerance (default 1e-12)");

    CLI::App* c_bound = app.add_subcommand(
        "bound", "sharp shear-coefficient bound with brute-force cross-check");
    add_io(c_bound, false);

    CLI::App* c_evolve = app.add_subcommand(
        "evolve", "integrate the Loewner flow and fit its series (or the chain limit)");
    add_io(c_evolve, true);
    c_evolve->add_option("--s", opt.s, "start time (default 0)");
    c_evolve->add_option("--t", opt.t, "end time (chain mode default: s + 20)");
    c_evolve->add_option("--degree", opt.degree, "stencil fit degree (default 4)");
    c_evolve->add_option("--tol", opt.tol, "ODE tolerance (default 1e-10)");
    c_evolve->add_flag("--chain", opt.chain, "recover the chain element e^t * flow limit");

    CLI::App* c_starlike =
        app.add_subcommand("starlike", "test a map for starlikeness by sampling");
    add_io(c_starlike, true);
    add_sampling(c_starlike);

    CLI::App* c_growth =
        app.add_subcommand("growth", "screen a map against the growth envelope");
    add_io(c_growth, true);
    add_sampling(c_growth);

    CLI::App* c_flow = app.add_subcommand(
        "flow", "shear-coefficient flow a(s,t) for a constant or piecewise q");
    add_io(c_flow, false);
    c_flow->add_option("--s", opt.s, "start time (default 0)");
    c_flow->add_option("--t", opt.t, "end time (required)");
    c_flow->add_option("--a", opt.a, "constant q value as RE IM")->expected(2);

    CLI::App* c_repro = app.add_subcommand(
        "reproduce", "end-to-end reproduction of the sharp coefficient bound");
    add_io(c_repro, false);
    add_sampling(c_repro);

    CLI::App* c_plot = app.add_subcommand("plot", "emit CSV plot data");
    c_plot->add_option("--kind", opt.kind, "envelope | defect-slice | flow-trajectory")
        ->required()
        ->check(CLI::IsMember({"envelope", "defect-slice", "flow-trajectory"}));
    c_plot->add_option("--out", opt.out_path, "write CSV here instead of stdout");
    c_plot->add_option("--s", opt.s, "range start (default 0)");
    c_plot->add_option("--t", opt.t, "range end (default 10)");
    c_plot->add_option("--step", opt.step, "sampling step");
    c_plot->add_option("--a", opt.a, "shear coefficient as RE IM")->expected(2);
    c_plot->add_option("--r", opt.r, "slice radius (default 0.999)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            app.exit(e, out, err);
            return 0;
        }
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (c_mminus->parsed()) return run_check_mminus(opt, out);
        if (c_shear->parsed()) return run_shear(opt, out);
        if (c_bound->parsed()) return run_bound(opt, out);
        if (c_evolve->parsed()) return run_evolve(opt, out);
        if (c_starlike->parsed()) return run_starlike(opt, out);
        if (c_growth->parsed()) return run_growth(opt, out);
        if (c_flow->parsed()) return run_flow(opt, out);
        if (c_repro->parsed()) return run_reproduce(opt, out);
        if (c_plot->parsed()) return run_plot(opt, out);
        err << "error: no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace loewner::cli
