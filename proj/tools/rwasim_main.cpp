#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rwasim/config.hpp"
#include "rwasim/csv.hpp"
#include "rwasim/engine.hpp"
#include "rwasim/errors.hpp"

using namespace rwasim;

namespace {

constexpr std::uint64_t kDefaultSeedBase = 42;

struct IoError {
    std::string what;
};

RunSettings load_settings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError{"cannot open config file '" + path + "'"};
    return parse_config(in, path);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError{"cannot open '" + path + "' for writing"};
    out << content;
    out.flush();
    if (!out) throw IoError{"failed writing '" + path + "'"};
}

std::uint64_t resolve_seed_base(const std::optional<std::uint64_t>& flag,
                                const RunSettings& settings) {
    if (flag.has_value()) return *flag;
    if (settings.seed_base.has_value()) return *settings.seed_base;
    if (const char* env = std::getenv("SIM_SEED_BASE")) {
        try {
            std::size_t used = 0;
            const std::string text(env);
            const std::uint64_t v = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            raise(Errc::ConfigInvalid,
                  std::string("SIM_SEED_BASE value '") + env + "' is not an integer");
        }
    }
    return kDefaultSeedBase;
}

std::vector<double> parse_ratio_list(const std::string& text) {
    std::vector<double> ratios;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            ratios.push_back(v);
        } catch (const std::exception&) {
            raise(Errc::ConfigInvalid, "ratio '" + token + "' is not a number");
        }
    }
    if (ratios.empty()) raise(Errc::ConfigInvalid, "ratio list is empty");
    return ratios;
}

std::string render_chain_trace(const ChainTrace& trace, Scheme scheme, std::uint64_t seed) {
    std::ostringstream out;
    out << "# ledger trace scheme=" << scheme_name(scheme) << " seed=" << seed << "\n";
    out << "total_submitted = " << trace.total_submitted << "\n";
    out << "blocks = " << trace.blocks.size() << "\n";
    out << "rejections = " << trace.rejections.size() << "\n";
    out << "minted_micros = " << trace.total_minted << "\n";
    out << "final_balance_micros = " << trace.final_balances << "\n";
    out << "final_locked_micros = " << trace.final_locked << "\n";
    for (const Block& block : trace.blocks) {
        out << "block " << block.height << " sealed_at=" << block.sealed_at
            << " txs=" << block.tx_ids.size() << ":";
        for (const std::string& id : block.tx_ids) out << " " << id;
        out << "\n";
    }
    for (const Rejection& rejection : trace.rejections) {
        out << "rejected " << rejection.tx_id << " at=" << rejection.at << " reason="
            << errc_name(rejection.reason) << "\n";
    }
    return out.str();
}

void emit_outputs(const RunSettings& settings, std::uint64_t seed_base,
                  const std::vector<SweepPoint>& points) {
    write_file(settings.out, render_csv(points));
    write_file(settings.out + ".config", render_config(settings, seed_base));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"agent-based simulator of tokenized spectrum markets"};
    app.require_subcommand(1);

    // ---- run -----------------------------------------------------------------
    auto* run = app.add_subcommand(
        "run", "one experiment per configured scheme at fixed settings");
    std::string run_config;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::string> run_out;
    std::optional<std::string> run_dump;
    run->add_option("config", run_config, "experiment config file")->required();
    run->add_option("--seed,--seed-base", run_seed,
                    "seed base (fallback: config, then SIM_SEED_BASE, then 42)");
    run->add_option("--out", run_out, "CSV output path");
    run->add_option("--dump-chain", run_dump,
                    "also write a ledger trace of the first scheme's first run");

    // ---- sweep-buyers --------------------------------------------------------
    auto* sweep_b = app.add_subcommand(
        "sweep-buyers", "sweep the buyer count across all configured schemes");
    std::optional<std::string> sb_config;
    std::optional<std::uint32_t> sb_from, sb_to, sb_step, sb_sellers, sb_seeds;
    std::optional<std::uint64_t> sb_seed;
    std::optional<std::string> sb_out;
    sweep_b->add_option("--config", sb_config, "experiment config file (optional)");
    sweep_b->add_option("--from", sb_from, "first buyer count (default 100)");
    sweep_b->add_option("--to", sb_to, "last buyer count (default 300)");
    sweep_b->add_option("--step", sb_step, "buyer count step (default 50)");
    sweep_b->add_option("--sellers", sb_sellers, "seller count (default 100)");
    sweep_b->add_option("--seeds", sb_seeds, "seeds per cell (default 10)");
    sweep_b->add_option("--seed-base,--seed", sb_seed, "seed base");
    sweep_b->add_option("--out", sb_out, "CSV output path");

    // ---- sweep-byzantine -----------------------------------------------------
    auto* sweep_z = app.add_subcommand(
        "sweep-byzantine", "sweep the byzantine ratio under one attack kind");
    std::optional<std::string> sz_config;
    std::string sz_attack;
    std::optional<std::string> sz_ratios;
    std::optional<std::uint32_t> sz_buyers, sz_sellers, sz_seeds;
    std::optional<std::uint64_t> sz_seed;
    std::optional<std::string> sz_out;
    sweep_z->add_option("--config", sz_config, "experiment config file (optional)");
    sweep_z
        ->add_option("--attack", sz_attack,
                     "attack kind: buyer-collusion | seller-collusion | default")
        ->required();
    sweep_z->add_option("--ratios", sz_ratios, "comma list (default 0,0.1,0.2,0.3)");
    sweep_z->add_option("--buyers", sz_buyers, "buyer count (default 200)");
    sweep_z->add_option("--sellers", sz_sellers, "seller count (default 100)");
    sweep_z->add_option("--seeds", sz_seeds, "seeds per cell (default 10)");
    sweep_z->add_option("--seed-base,--seed", sz_seed, "seed base");
    sweep_z->add_option("--out", sz_out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            RunSettings settings = load_settings(run_config);
            if (run_out) settings.out = *run_out;
            const std::uint64_t seed_base = resolve_seed_base(run_seed, settings);
            settings.experiment.validate();
            auto points = run_configured(settings.experiment, settings.schemes,
                                         settings.seeds, seed_base);
            emit_outputs(settings, seed_base, points);
            if (run_dump) {
                const Scheme first = settings.schemes.front();
                const std::uint64_t seed = run_seed_for(seed_base, first, 0);
                ChainTrace trace;
                run_experiment(settings.experiment, first, seed, "none", 0.0, &trace);
                write_file(*run_dump, render_chain_trace(trace, first, seed));
            }
        } else if (sweep_b->parsed()) {
            RunSettings settings = sb_config ? load_settings(*sb_config) : RunSettings{};
            if (sb_sellers) settings.experiment.n_sellers = *sb_sellers;
            if (sb_from) settings.buyers_from = *sb_from;
            if (sb_to) settings.buyers_to = *sb_to;
            if (sb_step) settings.buyers_step = *sb_step;
            if (sb_seeds) settings.seeds = *sb_seeds;
            if (sb_out) settings.out = *sb_out;
            const std::uint64_t seed_base = resolve_seed_base(sb_seed, settings);
            auto points =
                sweep_buyers(settings.experiment, settings.schemes, settings.buyers_from,
                             settings.buyers_to, settings.buyers_step, settings.seeds,
                             seed_base);
            emit_outputs(settings, seed_base, points);
        } else if (sweep_z->parsed()) {
            RunSettings settings = sz_config ? load_settings(*sz_config) : RunSettings{};
            auto kind = parse_attack_kind(sz_attack);
            if (!kind || *kind == AttackKind::None) {
                raise(Errc::ConfigInvalid, "unknown attack kind '" + sz_attack + "'");
            }
            if (sz_buyers) settings.experiment.n_buyers = *sz_buyers;
            if (sz_sellers) settings.experiment.n_sellers = *sz_sellers;
            if (sz_ratios) settings.ratios = parse_ratio_list(*sz_ratios);
            if (sz_seeds) settings.seeds = *sz_seeds;
            if (sz_out) settings.out = *sz_out;
            settings.experiment.attack.kind = *kind;
            const std::uint64_t seed_base = resolve_seed_base(sz_seed, settings);
            auto points = sweep_byzantine(settings.experiment, settings.schemes, *kind,
                                          settings.ratios, settings.seeds, seed_base);
            emit_outputs(settings, seed_base, points);
        }
    } catch (const SimError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what << "\n";
        return 3;
    }
    return 0;
}
