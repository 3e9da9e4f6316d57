#include "CLI11.hpp"

#include "fedpir/analysis.hpp"
#include "fedpir/assignment.hpp"
#include "fedpir/audit.hpp"
#include "fedpir/errors.hpp"
#include "fedpir/labels.hpp"
#include "fedpir/protocol.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fedpir;

namespace {

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

// Relative paths inside a config resolve against the config file itself.
fs::path sibling(const std::string& config_path, const std::string& ref) {
    fs::path p(ref);
    if (p.is_absolute()) return p;
    return fs::path(config_path).parent_path() / p;
}

TaskAssignment load_or_build_assignment(const ParsedConfig& pc, const std::string& config_path) {
    if (pc.assignment_file) {
        fs::path path = sibling(config_path, *pc.assignment_file);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open assignment file: " + path.string());
        TaskAssignment a = load_assignment(in);
        if (a.n != pc.cfg.n || a.T != pc.cfg.T || a.rho != pc.cfg.rho)
            throw ConfigError("assignment file dimensions disagree with the config");
        return a;
    }
    return build_cyclic_assignment(pc.cfg.n, pc.cfg.T, pc.cfg.rho);
}

LabelSet load_or_synth_labels(const ParsedConfig& pc, const TaskAssignment& a,
                              const std::string& config_path) {
    if (pc.labels_file) {
        fs::path path = sibling(config_path, *pc.labels_file);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open labels file: " + path.string());
        return import_labels(in, a, pc.cfg.s, pc.cfg.c, pc.cfg.gamma);
    }
    return synth_labels(pc.cfg.seed, a, pc.cfg.s, pc.cfg.c, pc.cfg.gamma);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

// Exact value first; decimal only when it adds information.
std::string show(const Rational& r) {
    if (r.is_integer()) return to_fraction(r);
    return to_fraction(r) + " (" + to_decimal(r) + ")";
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool symmetric,
                 std::optional<uint64_t> seed) {
    ParsedConfig pc = load_config(config_path);
    if (symmetric) pc.cfg.symmetric = true;
    if (seed) pc.cfg.seed = *seed;
    TaskAssignment a = load_or_build_assignment(pc, config_path);
    LabelSet labels = load_or_synth_labels(pc, a, config_path);

    RunResult res = run_end_to_end(pc.cfg, a, labels);

    fs::path dir(out_dir);
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir, "transcript.csv");
        write_transcript_csv(res.transcript, out);
    }
    {
        std::ofstream out = open_out(dir, "ledger.csv");
        uint64_t total =
            res.ledger.sharing_symbols + res.ledger.query_symbols + res.ledger.answer_symbols;
        out << "stage,symbols\n";
        out << "share," << res.ledger.sharing_symbols << "\n";
        out << "query," << res.ledger.query_symbols << "\n";
        out << "answer," << res.ledger.answer_symbols << "\n";
        out << "total," << total << "\n";
    }
    {
        std::ofstream out = open_out(dir, "result.txt");
        out << "objective " << pc.cfg.j + 1 << " of " << pc.cfg.T << ", q=" << pc.cfg.q
            << ", k_C=" << pc.cfg.k_C << ", partitions=" << pc.cfg.partitions()
            << ", symmetric=" << (pc.cfg.symmetric ? 1 : 0) << "\n";
        for (int l = 0; l < pc.cfg.s; ++l) {
            out << "sums sample " << l + 1 << ":";
            for (uint64_t v : res.sums[l]) out << " " << v;
            out << "\n";
        }
    }
    std::cout << "objective " << pc.cfg.j + 1 << " reconstructed over " << pc.cfg.n
              << " clients; symbols: share=" << res.ledger.sharing_symbols
              << " query=" << res.ledger.query_symbols
              << " answer=" << res.ledger.answer_symbols << "; files in " << dir.string() << "\n";
    return 0;
}

int cmd_rates(const std::string& config_path) {
    const ProtocolConfig& c = load_config(config_path).cfg;
    std::cout << "n=" << c.n << " T=" << c.T << " rho=" << c.rho << " z_s=" << c.z_s
              << " z_q=" << c.z_q << " (costs in s*c symbols)\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %-6s %-24s %-24s %s\n", "scheme", "k",
                  "sharing_rate", "pir_rate", "total_cost");
    std::cout << line;
    for (const RateRow& row : rate_table(c.n, c.T, c.rho, c.z_s, c.z_q)) {
        std::string k = row.has_k ? to_fraction(row.k) : "-";
        std::snprintf(line, sizeof(line), "%-10s %-6s %-24s %-24s %s\n", row.scheme.c_str(),
                      k.c_str(), show(row.sharing_rate).c_str(), show(row.pir_rate).c_str(),
                      show(row.total_cost).c_str());
        std::cout << line;
    }
    return 0;
}

int cmd_sweep(const std::string& out_dir, std::optional<int> figure) {
    fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<int> figures;
    if (figure)
        figures.push_back(*figure);
    else
        figures = {3, 4, 5, 6, 7};
    for (int f : figures) {
        Sweep sweep = sweep_figure(f);
        std::ofstream out = open_out(dir, figure_filename(f));
        write_sweep_csv(sweep, out);
        std::cout << figure_filename(f) << ": " << sweep.rows.size() << " rows";
        if (!sweep.skipped.empty()) std::cout << " (" << sweep.skipped.size() << " skipped)";
        std::cout << "\n";
    }
    return 0;
}

std::string one_based_set(const std::vector<int>& v) {
    std::string out = "{";
    for (size_t k = 0; k < v.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(v[k] + 1);
    }
    return out + "}";
}

SuiteEntry mi_suite_entry(std::string name, std::string definition, const MIAudit& r) {
    SuiteEntry e;
    e.name = std::move(name);
    e.definition = std::move(definition);
    e.states = r.states;
    if (r.exact_zero)
        e.mi_text = "0 (exact)";
    else if (r.representable)
        e.mi_text = to_fraction(r.bits) + " bit (exact)";
    else {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "~%.6Lg bit", r.bits_estimate);
        e.mi_text = buf;
    }
    e.detail = r.detail;
    e.pass = r.exact_zero;
    return e;
}

// Tries the full enumeration first, then successively pinned slices when the
// state guard trips. Only pins that leave the audited protection in play are
// offered; an empty fallback list means the guard error is final.
template <typename Fn>
auto with_pin_fallback(Fn fn, const std::vector<AuditOptions>& fallbacks, std::string& name) {
    try {
        return fn(AuditOptions{});
    } catch (const GuardError&) {
        for (size_t k = 0; k < fallbacks.size(); ++k) {
            try {
                auto r = fn(fallbacks[k]);
                name += " (pinned slice)";
                return r;
            } catch (const GuardError&) {
                if (k + 1 == fallbacks.size()) throw;
            }
        }
        throw;
    }
}

AuditOptions pin_share() {
    AuditOptions o;
    o.pin_share_coins_zero = true;
    return o;
}

AuditOptions pin_labels(bool also_share) {
    AuditOptions o;
    o.pin_labels_zero = true;
    o.pin_share_coins_zero = also_share;
    return o;
}

// Audits one user-supplied configuration: first z_s clients pool against the
// last one, first z_q clients pool their queries, federator audit when the
// config is symmetric, then the exhaustive correctness sweep.
SuiteResult audit_one_config(const ProtocolConfig& cfg) {
    MicroConfig mc = make_micro_config(cfg);
    std::vector<int> share_colluders, query_colluders;
    for (int i = 0; i < cfg.z_s; ++i) share_colluders.push_back(i);
    for (int i = 0; i < cfg.z_q; ++i) query_colluders.push_back(i);
    int target = cfg.n - 1;

    SuiteResult suite;
    {
        // Share coins are what the colluders must not see through, so no pin
        // can stand in for them here.
        std::string name = "data colluders=" + one_based_set(share_colluders) +
                           " target=" + std::to_string(target + 1);
        MIAudit r = with_pin_fallback(
            [&](const AuditOptions& o) { return audit_data_privacy(mc, share_colluders, target, o); },
            {}, name);
        suite.entries.push_back(mi_suite_entry(name, "data", r));
    }
    {
        std::string name = "objective colluders=" + one_based_set(query_colluders);
        MIAudit r = with_pin_fallback(
            [&](const AuditOptions& o) { return audit_objective_hiding(mc, query_colluders, o); },
            {pin_labels(false), pin_labels(true)}, name);
        suite.entries.push_back(mi_suite_entry(name, "objective", r));
    }
    if (cfg.symmetric) {
        std::string name = "federator j=" + std::to_string(cfg.j + 1);
        MIAudit r = with_pin_fallback(
            [&](const AuditOptions& o) { return audit_federator_privacy(mc, o); }, {pin_share()},
            name);
        suite.entries.push_back(mi_suite_entry(name, "federator", r));
    }
    {
        std::string name = "correctness j=" + std::to_string(cfg.j + 1);
        CorrectnessAudit corr = with_pin_fallback(
            [&](const AuditOptions& o) { return correctness_oracle(mc, o); },
            {pin_share(), pin_labels(true)}, name);
        SuiteEntry e;
        e.name = name;
        e.definition = "correctness";
        e.states = corr.states;
        e.detail = corr.detail;
        e.pass = corr.pass;
        suite.entries.push_back(e);
    }

    suite.all_pass = true;
    for (const SuiteEntry& en : suite.entries) suite.all_pass = suite.all_pass && en.pass;
    return suite;
}

int cmd_audit(const std::optional<std::string>& config_path, const std::string& out_dir,
              bool controls) {
    SuiteResult suite =
        config_path ? audit_one_config(load_config(*config_path).cfg) : run_audit_suite(controls);
    std::ostringstream report;
    write_suite_report(suite, report);
    std::cout << report.str();
    if (!out_dir.empty()) {
        fs::path dir(out_dir);
        fs::create_directories(dir);
        std::ofstream out = open_out(dir, "audit_report.txt");
        out << report.str();
    }
    return suite.all_pass ? 0 : 1;
}

int cmd_validate(const std::string& config_path) {
    ParsedConfig pc = load_config(config_path);
    TaskAssignment a = load_or_build_assignment(pc, config_path);
    ValidationReport rep = validate_assignment(a);
    for (const std::string& w : rep.warnings) std::cout << "warning: " << w << "\n";
    if (!rep.ok()) {
        for (const std::string& e : rep.errors) std::cerr << "error: " << e << "\n";
        return 2;
    }
    load_or_synth_labels(pc, a, config_path); // import errors surface here
    const ProtocolConfig& c = pc.cfg;
    std::cout << "ok: n=" << c.n << " T=" << c.T << " rho=" << c.rho << " z_s=" << c.z_s
              << " z_q=" << c.z_q << " s=" << c.s << " c=" << c.c << " gamma=" << c.gamma
              << " j=" << c.j + 1 << " -> q=" << c.q << " k_C=" << c.k_C
              << " width=" << c.width() << " partitions=" << c.partitions() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated one-shot label aggregation with private retrieval"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate",
                                   "run the protocol once; writes transcript.csv, ledger.csv, result.txt");
    std::string sim_config, sim_out = ".";
    bool sim_symmetric = false;
    std::optional<uint64_t> sim_seed;
    sim->add_option("--config", sim_config, "config file (key=value lines)")->required();
    sim->add_option("--out", sim_out, "output directory");
    sim->add_flag("--symmetric", sim_symmetric,
                  "mask answers so the federator learns only the queried aggregate");
    sim->add_option("--seed", sim_seed, "override the config seed");

    auto* rat = app.add_subcommand("rates", "print the rate and cost table for a configuration");
    std::string rat_config;
    rat->add_option("--config", rat_config, "config file")->required();

    auto* swp = app.add_subcommand("sweep", "write the cost-sweep figure CSVs");
    std::string swp_out = ".";
    std::optional<int> swp_figure;
    swp->add_option("--figure", swp_figure, "write one figure (3..7) instead of all")
        ->check(CLI::Range(3, 7));
    swp->add_option("--out", swp_out, "output directory");

    auto* aud = app.add_subcommand("audit", "exhaustive privacy and correctness audits");
    std::optional<std::string> aud_config;
    std::string aud_out;
    bool aud_controls = false;
    aud->add_option("--config", aud_config,
                    "audit this configuration instead of the built-in suite");
    aud->add_option("--out", aud_out, "also write audit_report.txt into this directory");
    aud->add_flag("--negative-controls", aud_controls,
                  "include seeded-defect controls in the built-in suite");

    auto* val = app.add_subcommand("validate", "check a config file and its referenced inputs");
    std::string val_config;
    val->add_option("--config", val_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_symmetric, sim_seed);
        if (rat->parsed()) return cmd_rates(rat_config);
        if (swp->parsed()) return cmd_sweep(swp_out, swp_figure);
        if (aud->parsed()) return cmd_audit(aud_config, aud_out, aud_controls);
        if (val->parsed()) return cmd_validate(val_config);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const GuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
