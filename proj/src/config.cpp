#include "rwasim/config.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <sstream>

#include "rwasim/errors.hpp"

namespace rwasim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

struct ParseContext {
    const std::string& source;
    std::size_t line = 0;

    [[noreturn]] void fail(Errc code, const std::string& what) const {
        raise(code, source + ":" + std::to_string(line) + ": " + what);
    }

    double number(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            fail(Errc::ConfigInvalid, "value '" + value + "' for '" + key + "' is not a number");
        }
    }

    std::uint64_t integer(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
            std::uint64_t v = std::stoull(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            fail(Errc::ConfigInvalid,
                 "value '" + value + "' for '" + key + "' is not a non-negative integer");
        }
    }
};

} // namespace

RunSettings parse_config(std::istream& in, const std::string& source_name) {
    RunSettings settings;
    ExperimentConfig& exp = settings.experiment;
    ParseContext ctx{source_name};
    std::string section;
    std::string line;

    while (std::getline(in, line)) {
        ++ctx.line;
        const std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') ctx.fail(Errc::ConfigInvalid, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "market" && section != "run" && section != "sweep" &&
                section != "ledger" && section != "cpa" && section != "attack") {
                ctx.fail(Errc::UnknownParameter, "unknown section '" + section + "'");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) ctx.fail(Errc::ConfigInvalid, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) ctx.fail(Errc::ConfigInvalid, "empty key");
        if (value.empty()) ctx.fail(Errc::ConfigInvalid, "empty value for '" + key + "'");
        if (section.empty()) {
            ctx.fail(Errc::ConfigInvalid, "key '" + key + "' appears before any [section]");
        }

        auto u32 = [&] { return static_cast<std::uint32_t>(ctx.integer(key, value)); };
        auto num = [&] { return ctx.number(key, value); };

        if (section == "market") {
            if (key == "n_buyers") exp.n_buyers = u32();
            else if (key == "n_sellers") exp.n_sellers = u32();
            else if (key == "buyer_demand_slices") exp.buyer_demand_slices = u32();
            else if (key == "slices_per_asset") exp.slices_per_asset = u32();
            else if (key == "valuation_lo") exp.valuation_lo = num();
            else if (key == "valuation_hi") exp.valuation_hi = num();
            else if (key == "cost_lo") exp.cost_lo = num();
            else if (key == "cost_hi") exp.cost_hi = num();
            else if (key == "holdout_share") exp.holdout_share = num();
            else if (key == "holdout_cost_lo") exp.holdout_cost_lo = num();
            else if (key == "holdout_cost_hi") exp.holdout_cost_hi = num();
            else if (key == "pool_target_revenue") exp.pool_target_revenue = num();
            else if (key == "last_slice_premium") exp.last_slice_premium = num();
            else ctx.fail(Errc::UnknownParameter, "unknown key '" + key + "' in [market]");
        } else if (section == "run") {
            if (key == "ticks") exp.ticks = u32();
            else if (key == "baseline_round_ticks") exp.baseline_round_ticks = u32();
            else if (key == "stall_ticks_stop") exp.stall_ticks_stop = u32();
            else if (key == "seeds") settings.seeds = u32();
            else if (key == "seed_base") settings.seed_base = ctx.integer(key, value);
            else if (key == "out") settings.out = value;
            else if (key == "schemes") {
                settings.schemes.clear();
                for (const std::string& name : split(value, ',')) {
                    auto scheme = parse_scheme(name);
                    if (!scheme) {
                        ctx.fail(Errc::ConfigInvalid, "unknown scheme '" + name + "'");
                    }
                    settings.schemes.push_back(*scheme);
                }
                if (settings.schemes.empty()) {
                    ctx.fail(Errc::ConfigInvalid, "schemes list is empty");
                }
            } else {
                ctx.fail(Errc::UnknownParameter, "unknown key '" + key + "' in [run]");
            }
        } else if (section == "sweep") {
            if (key == "buyers_from") settings.buyers_from = u32();
            else if (key == "buyers_to") settings.buyers_to = u32();
            else if (key == "buyers_step") settings.buyers_step = u32();
            else if (key == "ratios") {
                settings.ratios.clear();
                for (const std::string& r : split(value, ',')) {
                    settings.ratios.push_back(ctx.number(key, r));
                }
            } else {
                ctx.fail(Errc::UnknownParameter, "unknown key '" + key + "' in [sweep]");
            }
        } else if (section == "ledger") {
            if (key == "block_size") exp.ledger.block_size = ctx.integer(key, value);
            else if (key == "block_timeout_s") {
                exp.ledger.block_timeout_s = static_cast<long long>(ctx.integer(key, value));
            } else {
                ctx.fail(Errc::UnknownParameter, "unknown key '" + key + "' in [ledger]");
            }
        } else if (section == "cpa") {
            if (key == "virtual_nodes") exp.cpa_virtual_nodes = u32();
            else if (key == "income") exp.cpa_income = num();
            else ctx.fail(Errc::UnknownParameter, "unknown key '" + key + "' in [cpa]");
        } else {  // attack
            if (key == "kind") {
                auto kind = parse_attack_kind(value);
                if (!kind) ctx.fail(Errc::ConfigInvalid, "unknown attack kind '" + value + "'");
                exp.attack.kind = *kind;
            } else if (key == "byzantine_ratio") exp.attack.byzantine_ratio = num();
            else if (key == "bid_depression_factor") exp.attack.bid_depression_factor = num();
            else if (key == "ask_inflation_factor") exp.attack.ask_inflation_factor = num();
            else if (key == "supply_withholding") exp.attack.supply_withholding = num();
            else if (key == "default_probability") exp.attack.default_probability = num();
            else ctx.fail(Errc::UnknownParameter, "unknown key '" + key + "' in [attack]");
        }
    }
    return settings;
}

RunSettings parse_config_text(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    return parse_config(in, source_name);
}

std::string render_config(const RunSettings& settings, std::uint64_t seed_base) {
    const ExperimentConfig& exp = settings.experiment;
    std::ostringstream out;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };

    out << "[market]\n";
    out << "n_buyers = " << exp.n_buyers << "\n";
    out << "n_sellers = " << exp.n_sellers << "\n";
    out << "buyer_demand_slices = " << exp.buyer_demand_slices << "\n";
    out << "slices_per_asset = " << exp.slices_per_asset << "\n";
    out << "valuation_lo = " << num(exp.valuation_lo) << "\n";
    out << "valuation_hi = " << num(exp.valuation_hi) << "\n";
    out << "cost_lo = " << num(exp.cost_lo) << "\n";
    out << "cost_hi = " << num(exp.cost_hi) << "\n";
    out << "holdout_share = " << num(exp.holdout_share) << "\n";
    out << "holdout_cost_lo = " << num(exp.holdout_cost_lo) << "\n";
    out << "holdout_cost_hi = " << num(exp.holdout_cost_hi) << "\n";
    out << "pool_target_revenue = " << num(exp.pool_target_revenue) << "\n";
    out << "last_slice_premium = " << num(exp.last_slice_premium) << "\n";
    out << "\n[run]\n";
    out << "ticks = " << exp.ticks << "\n";
    out << "baseline_round_ticks = " << exp.baseline_round_ticks << "\n";
    out << "stall_ticks_stop = " << exp.stall_ticks_stop << "\n";
    out << "schemes = ";
    for (std::size_t i = 0; i < settings.schemes.size(); ++i) {
        if (i) out << ",";
        out << scheme_name(settings.schemes[i]);
    }
    out << "\n";
    out << "seeds = " << settings.seeds << "\n";
    out << "seed_base = " << seed_base << "\n";
    out << "out = " << settings.out << "\n";
    out << "\n[sweep]\n";
    out << "buyers_from = " << settings.buyers_from << "\n";
    out << "buyers_to = " << settings.buyers_to << "\n";
    out << "buyers_step = " << settings.buyers_step << "\n";
    out << "ratios = ";
    for (std::size_t i = 0; i < settings.ratios.size(); ++i) {
        if (i) out << ",";
        out << num(settings.ratios[i]);
    }
    out << "\n";
    out << "\n[ledger]\n";
    out << "block_size = " << exp.ledger.block_size << "\n";
    out << "block_timeout_s = " << exp.ledger.block_timeout_s << "\n";
    out << "\n[cpa]\n";
    out << "virtual_nodes = " << exp.cpa_virtual_nodes << "\n";
    out << "income = " << num(exp.cpa_income) << "\n";
    out << "\n[attack]\n";
    out << "kind = " << attack_kind_name(exp.attack.kind) << "\n";
    out << "byzantine_ratio = " << num(exp.attack.byzantine_ratio) << "\n";
    out << "bid_depression_factor = " << num(exp.attack.bid_depression_factor) << "\n";
    out << "ask_inflation_factor = " << num(exp.attack.ask_inflation_factor) << "\n";
    out << "supply_withholding = " << num(exp.attack.supply_withholding) << "\n";
    out << "default_probability = " << num(exp.attack.default_probability) << "\n";
    return out.str();
}

} // namespace rwasim
