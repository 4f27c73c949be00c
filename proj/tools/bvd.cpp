// Command-line front end: build diagrams, run the extension constructions,
// trace orbits, realize target frequencies, and scan spectra.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bvd/coding.hpp"
#include "bvd/extension.hpp"
#include "bvd/serial.hpp"
#include "bvd/spectra.hpp"
#include "bvd/vershik.hpp"

namespace {

using namespace bvd;

constexpr int kExitOk = 0;
constexpr int kExitBudget = 2;
constexpr int kExitUnreachable = 3;
constexpr int kExitInvalid = 4;

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

struct RunConfig {
    std::uint64_t seed = 1;
    int budget_depth = 7;
    std::uint64_t budget_steps = 1u << 20;
    std::string out;
    std::string format = "json";
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    const Json j = read_json_file(path);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("budget_depth")) cfg.budget_depth = j.at("budget_depth").get<int>();
    if (j.contains("budget_steps")) cfg.budget_steps = j.at("budget_steps").get<std::uint64_t>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
}

Json config_echo(const RunConfig& cfg) {
    Json j;
    j["seed"] = cfg.seed;
    j["budget_depth"] = cfg.budget_depth;
    j["budget_steps"] = cfg.budget_steps;
    return j;
}

FinitePath parse_start(const OrderedBratteliDiagram& d, const std::string& spec) {
    const VertexRef top{d.depth(), 0};
    if (spec == "min") return extremal_paths(d, top, 0).first;
    if (spec.rfind("rank:", 0) == 0) return path_at_rank(d, top, BigCount(spec.substr(5)));
    throw InvalidInput("start must be 'min' or 'rank:<t>'");
}

Json band_json(const BandCheck& b) {
    Json j;
    j["segment"] = b.index;
    j["window"] = b.window.get_str();
    j["value"] = rational_json(b.value);
    j["value_float"] = rational_double(b.value);
    j["bound"] = rational_json(b.bound);
    j["side"] = b.lower ? "lower" : "upper";
    j["ok"] = b.ok;
    return j;
}

std::vector<Rational> default_deltas(const Rational& nu, int k) {
    std::vector<Rational> deltas;
    for (int i = 1; i <= k; ++i) {
        Rational d = make_rational(1, std::int64_t(1) << i);
        if (d * 4 > nu) d = nu / 4;
        deltas.push_back(d);
    }
    return deltas;
}

std::vector<int> auto_ladder(const OrderedBratteliDiagram& ed_diagram, const Rational& nu,
                             int rungs) {
    for (int n1 = 2; n1 + rungs - 1 <= ed_diagram.depth(); ++n1) {
        std::vector<int> ladder{n1};
        const auto deltas = default_deltas(nu, rungs);
        try {
            for (int i = 1; i < rungs; ++i)
                ladder.push_back(find_exceeding_level(ed_diagram, ladder.back(), deltas[i],
                                                      ed_diagram.depth()));
            return ladder;
        } catch (const BudgetExceeded&) {
            continue;
        }
    }
    throw BudgetExceeded("no certified ladder fits within the diagram depth");
}

int cmd_build(const RunConfig& cfg, const std::string& kind, const std::string& edges,
              const std::string& coeffs, const std::string& in_file) {
    OrderedBratteliDiagram d;
    if (kind == "odometer") {
        d = odometer_diagram(parse_u64_list(edges));
    } else if (kind == "sturmian") {
        d = sturmian_diagram(parse_u64_list(coeffs));
        // reject builds that fail the factor-complexity oracle
        const std::uint64_t window = 256;
        if (d.path_count({d.depth(), 0}) > window) {
            auto w = to_word(d, extremal_paths(d, {d.depth(), 0}, 0).first, window);
            for (std::size_t l = 1; l <= 8 && 10 * l <= window; ++l)
                if (factor_complexity(w, l) != l + 1)
                    throw InvalidInput("sturmian builder failed the complexity oracle");
        }
    } else if (kind == "file") {
        d = diagram_from_json(read_json_file(in_file));
    } else {
        throw InvalidInput("unknown build kind: " + kind);
    }
    auto violations = validate(d);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "violation " << v.code << " at level " << v.level << " vertex "
                      << v.vertex << ": " << v.message << "\n";
        return kExitInvalid;
    }
    write_json_file(diagram_to_json(d), cfg.out);
    std::cout << "wrote " << cfg.out << "\n";
    return kExitOk;
}

int cmd_extend(const RunConfig& cfg, const std::string& in_file, const std::string& mode,
               const std::string& report_file, int coloured_levels, std::uint64_t thin_width) {
    auto d = diagram_from_json(read_json_file(in_file));
    Json report;
    report["config"] = config_echo(cfg);
    if (mode == "two") {
        ExtendBudget budget;
        budget.target_depth = cfg.budget_depth;
        auto res = build_two_to_one(d, budget);
        report["mode"] = "two";
        report["cuts"] = res.cuts;
        Json checks = Json::array();
        for (const auto& c : res.ratio_checks) {
            Json j;
            j["level"] = c.level;
            j["vertex"] = c.vertex;
            j["extremal_heads"] = c.numerator.get_str();
            j["heads"] = c.denominator.get_str();
            j["below_half"] = c.ok;
            checks.push_back(std::move(j));
        }
        report["extremal_ratio_checks"] = std::move(checks);
        report["copy_counts"] = res.triple.spec.copy_counts;
        write_json_file(triple_to_json(res.triple), cfg.out);
    } else if (mode == "three") {
        ColourBudget budget;
        budget.coloured_levels = coloured_levels;
        budget.thin_width = thin_width;
        auto coloured = color_diagram(d, budget);
        auto triple = build_three_to_one(coloured.diagram);
        report["mode"] = "three";
        report["cuts"] = coloured.cuts;
        Json levels = Json::array();
        for (const auto& lv : coloured.levels) {
            Json j;
            j["level"] = lv.level;
            j["i1"] = lv.i1.get_str();
            j["i2"] = lv.i2.get_str();
            j["rho"] = lv.rho;
            j["min_degree"] = lv.min_degree;
            j["band_lhs"] = lv.band_lhs.get_str();
            j["min_thick"] = lv.band_rhs.get_str();
            j["band_ok"] = lv.band_lhs < lv.band_rhs;
            if (lv.rho_required) {
                j["rho_lhs"] = lv.rho_lhs.get_str();
                j["rho_ok"] = lv.rho_lhs < lv.rho_rhs;
            }
            levels.push_back(std::move(j));
        }
        report["colour_levels"] = std::move(levels);
        report["copy_counts"] = triple.spec.copy_counts;
        write_json_file(triple_to_json(triple), cfg.out);
    } else {
        throw InvalidInput("mode must be 'two' or 'three'");
    }
    if (!report_file.empty()) write_json_file(report, report_file);
    std::cout << "wrote " << cfg.out << "\n";
    return kExitOk;
}

int cmd_orbit(const RunConfig& cfg, const std::string& triple_file, const std::string& start,
              std::uint64_t steps, std::uint64_t stride, const std::string& lift) {
    auto triple = triple_from_json(read_json_file(triple_file));
    if (steps > cfg.budget_steps) throw BudgetExceeded("steps exceed --budget-steps");
    auto ed = extended_diagram(triple, triple.base.depth());
    auto head = parse_start(triple.base, start);
    auto rows = frequency_trace(triple, ed, head, steps, stride,
                                lift == "singleton" ? LiftPolicy::SingletonCopy0
                                                    : LiftPolicy::FullPreimage);
    std::ofstream out(cfg.out);
    if (!out) throw InvalidInput("cannot open for writing: " + cfg.out);
    write_trace_csv(rows, out);
    std::cout << "wrote " << cfg.out << "\n";
    return kExitOk;
}

int cmd_realize(const RunConfig& cfg, const std::string& triple_file, const std::string& nu_str,
                const std::string& ladder_str, const std::string& trace_file) {
    auto triple = triple_from_json(read_json_file(triple_file));
    auto ed = extended_diagram(triple, triple.base.depth());
    const Rational nu = rational_from_string(nu_str);

    std::vector<int> ladder;
    if (ladder_str == "auto") {
        ladder = auto_ladder(ed.diagram, nu, 3);
    } else {
        ladder = parse_int_list(ladder_str);
        if (ladder.size() % 2 == 0) {
            // even ladders extend by one certified level
            const auto deltas = default_deltas(nu, static_cast<int>(ladder.size()) + 1);
            ladder.push_back(find_exceeding_level(ed.diagram, ladder.back(),
                                                  deltas[ladder.size()], ed.diagram.depth()));
        }
    }
    const auto deltas = default_deltas(nu, static_cast<int>(ladder.size()));
    auto plan = realize_frequency(triple, ed, nu, deltas, ladder);

    Json j;
    j["config"] = config_echo(cfg);
    j["nu"] = rational_json(nu);
    j["ladder"] = plan.ladder;
    Json deltas_json = Json::array();
    for (const auto& d : plan.deltas) deltas_json.push_back(rational_json(d));
    j["deltas"] = std::move(deltas_json);
    Json certs = Json::array();
    for (const auto& c : plan.certificates) {
        Json cj;
        cj["n"] = c.n;
        cj["N"] = c.N;
        cj["delta"] = rational_json(c.delta);
        cj["min_premaximal_steps"] = c.min_premaximal_steps.get_str();
        cj["max_base_steps"] = c.max_base_steps.get_str();
        cj["vacuous"] = c.vacuous;
        cj["ok"] = c.ok;
        certs.push_back(std::move(cj));
    }
    j["certificates"] = std::move(certs);
    j["start_rank"] = plan.start_rank.get_str();
    Json bands = Json::array();
    for (const auto& b : plan.bands) bands.push_back(band_json(b));
    j["bands"] = std::move(bands);
    j["all_bands_ok"] = plan.all_bands_ok;
    write_json_file(j, cfg.out);

    if (!trace_file.empty()) {
        // checkpoint trace along the plan path: exact averages at the band
        // windows plus geometric sample points
        WindowCounter counter(ed.diagram, level1_flag_automaton(ed.forked_level1()));
        const VertexRef top{plan.ladder.back(), plan.path.end_vertex()};
        std::vector<TraceRow> rows;
        std::vector<BigCount> points;
        for (const auto& b : plan.bands) points.push_back(b.window);
        for (BigCount w = 16; w < plan.bands.back().window; w *= 4) points.push_back(w);
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        for (const auto& w : points) {
            TraceRow row;
            row.step = w;
            row.s = make_rational(counter.hits(top, plan.start_rank, plan.start_rank + w), w);
            row.s_d = row.s;
            row.in_d = false;
            rows.push_back(std::move(row));
        }
        std::ofstream out(trace_file);
        if (!out) throw InvalidInput("cannot open for writing: " + trace_file);
        write_trace_csv(rows, out);
    }
    std::cout << "wrote " << cfg.out << "\n";
    return plan.all_bands_ok ? kExitOk : kExitUnreachable;
}

int cmd_scan(const RunConfig& cfg, const std::string& triple_file, int grid,
             const std::string& mode, int samples) {
    auto triple = triple_from_json(read_json_file(triple_file));
    Json j;
    j["config"] = config_echo(cfg);
    if (grid == 0 && mode == "interval") {
        j["mode"] = "interval";
        j["targets"] = Json::array();
        write_json_file(j, cfg.out);
        std::cout << "wrote " << cfg.out << "\n";
        return kExitOk;
    }
    if (mode == "interval") {
        auto ed = extended_diagram(triple, triple.base.depth());
        if (triple.base.level_size(triple.base.depth()) != 1)
            throw InvalidInput("interval scan needs a single-vertex top level");
        const Rational cap = mu_d_estimate(triple, triple.base.depth(), {Rational(1)});
        j["mode"] = "interval";
        j["cap"] = rational_json(cap);
        Json targets = Json::array();
        bool all = true;
        for (int g = 1; g <= grid; ++g) {
            const Rational nu = cap * make_rational(19, 20) * make_rational(g, grid + 1);
            Json tj;
            tj["nu"] = rational_json(nu);
            tj["nu_float"] = rational_double(nu);
            try {
                auto ladder = auto_ladder(ed.diagram, nu, 3);
                auto plan = realize_frequency(triple, ed, nu, default_deltas(nu, 3), ladder);
                tj["witnessed"] = plan.all_bands_ok;
                Json bands = Json::array();
                for (const auto& b : plan.bands) bands.push_back(band_json(b));
                tj["bands"] = std::move(bands);
                all = all && plan.all_bands_ok;
            } catch (const TargetUnreachable& e) {
                tj["witnessed"] = false;
                tj["error"] = e.what();
                all = false;
            }
            targets.push_back(std::move(tj));
        }
        j["targets"] = std::move(targets);
        j["all_witnessed"] = all;
        write_json_file(j, cfg.out);
        std::cout << "wrote " << cfg.out << "\n";
        return all ? kExitOk : kExitUnreachable;
    }
    if (mode != "gap") throw InvalidInput("scan mode must be 'interval' or 'gap'");

    auto report = gap_check_three_to_one(triple, samples, cfg.seed);
    j["mode"] = "gap";
    Json sj = Json::array();
    bool gap_clean = true;
    const Rational lo = make_rational(1, 1000);
    const Rational hi = make_rational(1, 3) - make_rational(1, 1000);
    for (const auto& s : report.samples) {
        Json e;
        e["crossing_level"] = s.crossing_level;
        e["start_rank"] = s.start_rank.get_str();
        e["window"] = s.window.get_str();
        e["hits"] = s.hits.get_str();
        const Rational v = make_rational(s.hits, s.window);
        e["value"] = rational_json(v);
        e["value_float"] = rational_double(v);
        e["at_least_third"] = s.pass_third;
        e["crossing_average_below_half"] = s.cstar2_ok;
        gap_clean = gap_clean && !(v > lo && v < hi);
        sj.push_back(std::move(e));
    }
    j["samples"] = std::move(sj);
    j["min_value"] = rational_json(report.min_sdm);
    j["max_value"] = rational_json(report.max_sdm);
    j["all_at_least_third"] = report.all_pass;
    j["has_zero_frequency_witness"] = report.has_zero_witness;
    if (report.has_zero_witness)
        j["zero_witness_window"] = report.zero_witness_window.get_str();
    j["no_value_in_gap"] = gap_clean;
    write_json_file(j, cfg.out);
    std::cout << "wrote " << cfg.out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordered Bratteli diagrams, copy-paste extensions, and visit-frequency "
                 "analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string config_file;
    app.add_option("--seed", cfg.seed, "random seed (all sampling is derived from it)");
    app.add_option("--budget-depth", cfg.budget_depth, "depth budget for constructions");
    app.add_option("--budget-steps", cfg.budget_steps, "step budget for orbit walks");
    app.add_option("--config", config_file, "JSON config file with defaults");
    app.add_option("--format", cfg.format, "output format (json|csv)");

    auto* build = app.add_subcommand("build", "build a diagram and write it as JSON");
    std::string kind, edges, coeffs, in_file;
    build->add_option("kind", kind, "odometer|sturmian|file")->required();
    build->add_option("--edges", edges, "odometer edge counts, comma separated");
    build->add_option("--coeffs", coeffs, "sturmian coefficients, comma separated");
    build->add_option("--in", in_file, "input diagram (kind=file)");
    build->add_option("--out", cfg.out, "output path")->required();

    auto* extend = app.add_subcommand("extend", "build an extension triple");
    std::string ext_in, ext_mode = "two", report_file;
    int coloured_levels = 2;
    std::uint64_t thin_width = 2;
    extend->add_option("--in", ext_in, "base diagram JSON")->required();
    extend->add_option("--mode", ext_mode, "two|three");
    extend->add_option("--report", report_file, "certificate report path");
    extend->add_option("--coloured-levels", coloured_levels, "levels to colour (mode three)");
    extend->add_option("--thin-width", thin_width, "minimum thin band width (mode three)");
    extend->add_option("--out", cfg.out, "output triple path")->required();

    auto* orbit = app.add_subcommand("orbit", "trace visit frequencies along an orbit");
    std::string triple_file, start = "min", lift = "full";
    std::uint64_t steps = 1000, stride = 1;
    orbit->add_option("--triple", triple_file, "triple JSON")->required();
    orbit->add_option("--start", start, "min | rank:<t>");
    orbit->add_option("--steps", steps, "orbit steps");
    orbit->add_option("--stride", stride, "emit every k-th row");
    orbit->add_option("--lift", lift, "full | singleton");
    orbit->add_option("--out", cfg.out, "trace CSV path")->required();

    auto* realize = app.add_subcommand("realize", "construct a frequency-realizing plan");
    std::string nu_str, ladder_str = "auto", trace_file;
    realize->add_option("--triple", triple_file, "triple JSON")->required();
    realize->add_option("--nu", nu_str, "target frequency (p/q or decimal)")->required();
    realize->add_option("--ladder", ladder_str, "comma-separated levels or 'auto'");
    realize->add_option("--trace", trace_file, "checkpoint trace CSV path");
    realize->add_option("--out", cfg.out, "plan JSON path")->required();

    auto* scan = app.add_subcommand("scan", "scan the spectrum");
    int grid = 9, samples = 40;
    std::string scan_mode = "interval";
    scan->add_option("--triple", triple_file, "triple JSON")->required();
    scan->add_option("--grid", grid, "number of interval targets");
    scan->add_option("--mode", scan_mode, "interval | gap");
    scan->add_option("--samples", samples, "orbit samples (gap mode)");
    scan->add_option("--out", cfg.out, "report path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) apply_config_file(cfg, config_file);
        if (cfg.format != "json" && cfg.format != "csv")
            throw InvalidInput("--format must be json or csv");
        if (build->parsed()) return cmd_build(cfg, kind, edges, coeffs, in_file);
        if (extend->parsed())
            return cmd_extend(cfg, ext_in, ext_mode, report_file, coloured_levels, thin_width);
        if (orbit->parsed()) return cmd_orbit(cfg, triple_file, start, steps, stride, lift);
        if (realize->parsed()) return cmd_realize(cfg, triple_file, nu_str, ladder_str, trace_file);
        if (scan->parsed()) return cmd_scan(cfg, triple_file, grid, scan_mode, samples);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const TargetUnreachable& e) {
        std::cerr << "target unreachable: " << e.what() << "\n";
        return kExitUnreachable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
