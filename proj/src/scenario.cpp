#include "chainlab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace chainlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) { return v == "true" || v == "yes" || v == "1"; }

} // namespace

ScenarioDoc parse_scenario_text(const std::string& text, const std::string& origin) {
    ScenarioDoc doc;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    ScenarioDoc::Section* current = nullptr;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            ScenarioDoc::Section s;
            s.name = trim(line.substr(1, line.size() - 2));
            s.line = lineno;
            doc.sections.push_back(std::move(s));
            current = &doc.sections.back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        ScenarioDoc::KV kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (kv.key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (current)
            current->entries.push_back(std::move(kv));
        else
            doc.globals.push_back(std::move(kv));
    }
    return doc;
}

ScenarioDoc parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path);
}

void apply_override(ScenarioDoc& doc, const std::string& path, const std::string& value) {
    auto dot1 = path.find('.');
    if (dot1 == std::string::npos) {
        doc.set_global(path, value);
        return;
    }
    std::string section = path.substr(0, dot1);
    std::string rest = path.substr(dot1 + 1);
    auto dot2 = rest.find('.');
    std::string name, key;
    if (dot2 == std::string::npos) {
        key = rest;
    } else {
        name = rest.substr(0, dot2);
        key = rest.substr(dot2 + 1);
    }
    bool touched = false;
    for (auto& s : doc.sections) {
        if (s.name != section)
            continue;
        if (!name.empty()) {
            const std::string* n = s.get("name");
            if (!n)
                n = s.get("label");
            if (!n || *n != name)
                continue;
        }
        s.set(key, value);
        touched = true;
    }
    if (!touched) {
        if (!name.empty())
            throw DanglingReferenceError("override path matches no section: " + path);
        // Settings sections may be absent from the file; create them.
        ScenarioDoc::Section s;
        s.name = section;
        s.set(key, value);
        doc.sections.push_back(std::move(s));
    }
}

namespace {

struct Ctx {
    std::vector<std::string>* errors;
    void fail(int line, const std::string& msg) {
        errors->push_back((line > 0 ? "line " + std::to_string(line) + ": " : "") + msg);
    }
};

double num(const std::string& v, bool& ok) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        ok = used == v.size();
        return d;
    } catch (...) {
        ok = false;
        return 0;
    }
}

std::vector<RewardSegment> parse_schedule(const std::string& v, bool& ok) {
    std::vector<RewardSegment> sched;
    ok = true;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) {
            ok = false;
            return sched;
        }
        bool o1 = false, o2 = false;
        double h = num(trim(item.substr(0, colon)), o1);
        double r = num(trim(item.substr(colon + 1)), o2);
        if (!o1 || !o2) {
            ok = false;
            return sched;
        }
        sched.push_back({static_cast<std::int64_t>(h), coins(r)});
    }
    if (sched.empty())
        ok = false;
    return sched;
}

} // namespace

SimSetup build_setup(const ScenarioDoc& doc, std::vector<std::string>& errors) {
    Ctx ctx{&errors};
    SimSetup setup;

    auto g = [&](const char* key) { return doc.global(key); };
    if (auto* v = g("name"))
        setup.name = *v;
    if (auto* v = g("master_seed")) {
        bool ok = false;
        double d = num(*v, ok);
        if (!ok || d < 0)
            ctx.fail(0, "master_seed: not a non-negative integer");
        else
            setup.master_seed = static_cast<std::uint64_t>(d);
    } else {
        ctx.fail(0, "missing required field: master_seed");
    }
    if (auto* v = g("duration")) {
        bool ok = false;
        setup.duration = num(*v, ok);
        if (!ok || setup.duration <= 0)
            ctx.fail(0, "duration: must be a positive number of seconds");
    } else {
        ctx.fail(0, "missing required field: duration");
    }
    if (auto* v = g("metrics_interval")) {
        bool ok = false;
        setup.metrics_interval = num(*v, ok);
        if (!ok)
            ctx.fail(0, "metrics_interval: not a number");
    }

    auto read_num = [&](const ScenarioDoc::Section& s, const char* key, double dflt) {
        const std::string* v = s.get(key);
        if (!v)
            return dflt;
        bool ok = false;
        double d = num(*v, ok);
        if (!ok) {
            ctx.fail(s.line, s.name + "." + key + ": not a number: " + *v);
            return dflt;
        }
        return d;
    };
    auto read_bool = [&](const ScenarioDoc::Section& s, const char* key, bool dflt) {
        const std::string* v = s.get(key);
        return v ? parse_bool(*v) : dflt;
    };
    auto read_str = [&](const ScenarioDoc::Section& s, const char* key, const std::string& dflt) {
        const std::string* v = s.get(key);
        return v ? *v : dflt;
    };

    for (const auto& s : doc.sections) {
        if (s.name == "coin") {
            CoinSetup cs;
            if (const std::string* preset = s.get("preset")) {
                try {
                    cs.spec = coin_preset(*preset);
                } catch (const UnknownPresetError& e) {
                    ctx.fail(s.line, e.what());
                    continue;
                }
            }
            if (const std::string* label = s.get("label"))
                cs.spec.label = *label;
            if (const std::string* fam = s.get("hash_family"))
                cs.spec.hash_family = *fam;
            if (s.get("block_time"))
                cs.spec.block_time_target = read_num(s, "block_time", 600);
            if (s.get("retarget_interval"))
                cs.spec.retarget_interval =
                    static_cast<std::int64_t>(read_num(s, "retarget_interval", 2016));
            if (const std::string* sched = s.get("reward_schedule")) {
                bool ok = false;
                cs.spec.reward_schedule = parse_schedule(*sched, ok);
                if (!ok)
                    ctx.fail(s.line, "coin.reward_schedule: expected height:reward[,height:reward...]");
            }
            if (s.get("max_supply"))
                cs.spec.max_supply = coins(read_num(s, "max_supply", 0));
            if (const std::string* mp = s.get("merged_parent"))
                cs.spec.merged_mining_parent = *mp;
            cs.initial_hashes_per_block = read_num(s, "initial_difficulty", 0);
            cs.price.fixed_price = read_num(s, "price", 1.0);
            if (const std::string* csv = s.get("price_csv")) {
                try {
                    PriceModel m = load_price_series_csv(*csv);
                    m.fixed_price = cs.price.fixed_price;
                    cs.price = m;
                } catch (const SimError& e) {
                    ctx.fail(s.line, e.what());
                }
            }
            if (cs.spec.label.empty())
                ctx.fail(s.line, "coin: needs a preset or a label");
            if (cs.spec.reward_schedule.empty())
                ctx.fail(s.line, "coin " + cs.spec.label + ": needs a reward_schedule or preset");
            else
                setup.coins.push_back(std::move(cs));
        } else if (s.name == "network") {
            std::string family = read_str(s, "latency", "fixed");
            if (family == "fixed") {
                setup.latency = LatencyModel::fixed(read_num(s, "delay", 1.0));
            } else if (family == "lognormal") {
                double median = read_num(s, "median", 6.5);
                double mean = read_num(s, "mean", 12.6);
                try {
                    setup.latency = LatencyModel::lognormal(median, mean);
                } catch (const SimError& e) {
                    ctx.fail(s.line, e.what());
                }
            } else {
                ctx.fail(s.line, "network.latency: unknown family " + family);
            }
        } else if (s.name == "market") {
            setup.market.enabled = read_bool(s, "enabled", true);
            setup.market.market.tick_interval = read_num(s, "tick_interval", 600);
            setup.market.market.migration_responsiveness = read_num(s, "responsiveness", 0.2);
            setup.market.market.hysteresis = read_num(s, "hysteresis", 0.01);
            setup.market.market.rental_hash = read_num(s, "rental_hash", 0);
            setup.market.market.rental_price = read_num(s, "rental_price", 0);
        } else if (s.name == "miner") {
            MinerSetup ms;
            ms.name = read_str(s, "name", "miner" + std::to_string(setup.miners.size()));
            ms.hash_rate = read_num(s, "hash_rate", 0);
            ms.coin = read_str(s, "coin", "");
            ms.electricity = read_num(s, "electricity", 0);
            ms.migratory = read_bool(s, "migratory", false);
            ms.accept_bribes = read_bool(s, "accept_bribes", false);
            ms.count = static_cast<int>(read_num(s, "count", 1));
            if (ms.hash_rate <= 0)
                ctx.fail(s.line, "miner " + ms.name + ": hash_rate must be > 0");
            setup.miners.push_back(std::move(ms));
        } else if (s.name == "pool") {
            PoolSetup ps;
            ps.name = read_str(s, "name", "pool" + std::to_string(setup.pools.size()));
            ps.coin = read_str(s, "coin", "");
            ps.members = static_cast<int>(read_num(s, "members", 1));
            ps.member_hash_rate = read_num(s, "member_hash_rate", 0);
            std::string strat = read_str(s, "strategy", "honest");
            if (strat == "honest")
                ps.strategy = ManagerStrategy::Honest;
            else if (strat == "hidden_fork")
                ps.strategy = ManagerStrategy::HiddenFork;
            else if (strat == "cross_coin_redirect")
                ps.strategy = ManagerStrategy::CrossCoinRedirect;
            else if (strat == "cartel")
                ps.strategy = ManagerStrategy::Cartel;
            else
                ctx.fail(s.line, "pool " + ps.name + ": unknown strategy " + strat);
            std::string proto = read_str(s, "protocol", "h0_only");
            if (proto == "h0_only")
                ps.protocol = WorkProtocol::H0Only;
            else if (proto == "stratum_like")
                ps.protocol = WorkProtocol::StratumLike;
            else
                ctx.fail(s.line, "pool " + ps.name + ": unknown protocol " + proto);
            ps.redirect_coin = read_str(s, "redirect_coin", "");
            setup.pools.push_back(std::move(ps));
        } else if (s.name == "peer") {
            PeerSetup ps;
            ps.name = read_str(s, "name", "peer" + std::to_string(setup.peers.size()));
            ps.confirmer = read_bool(s, "confirmer", false);
            ps.count = static_cast<int>(read_num(s, "count", 1));
            setup.peers.push_back(std::move(ps));
        } else if (s.name == "attack") {
            AttackSetup as;
            std::string type = read_str(s, "type", "double_spend");
            if (type == "double_spend")
                as.type = AttackSetup::Type::DoubleSpend;
            else if (type == "hidden_fork")
                as.type = AttackSetup::Type::HiddenFork;
            else
                ctx.fail(s.line, "attack: unknown type " + type);
            as.coin = read_str(s, "coin", "");
            as.pool = read_str(s, "pool", "");
            as.attacker_hash = read_num(s, "attacker_hash", 0);
            as.rented_fraction = read_num(s, "rented_fraction", 1.0);
            as.z_wait = static_cast<std::int64_t>(read_num(s, "z_wait", 6));
            as.trigger = read_num(s, "trigger", 0);
            as.deadline = read_num(s, "deadline", 0);
            as.budget = read_num(s, "budget", 0);
            as.value = coins(read_num(s, "value", 0));
            as.premium = read_num(s, "premium", 0);
            as.displace = read_bool(s, "displace", false);
            as.bribe = read_num(s, "bribe", 0);
            setup.attacks.push_back(std::move(as));
        } else if (s.name == "payment") {
            PaymentSetup ps;
            ps.coin = read_str(s, "coin", "");
            ps.amount = coins(read_num(s, "amount", 0));
            ps.at = read_num(s, "at", 0);
            setup.payments.push_back(std::move(ps));
        } else if (s.name == "defense") {
            std::string v = read_str(s, "variant", "baseline");
            auto parsed = parse_defense_variant(v);
            if (!parsed)
                ctx.fail(s.line, "defense.variant: unknown variant " + v);
            else
                setup.variant = *parsed;
            setup.adjudication_threshold = read_num(s, "threshold", 20.0);
            setup.confirmer_depth = static_cast<int>(read_num(s, "confirmer_depth", 3));
            setup.confirmer_fee = coins(read_num(s, "confirmer_fee", 0.001));
            setup.share_evidence_zeros =
                static_cast<std::int32_t>(read_num(s, "share_zeros", 48));
        } else if (s.name == "engine") {
            setup.work_cadence = read_num(s, "work_cadence", 30.0);
            setup.record_traces = read_bool(s, "record_traces", false);
            setup.stop_after_attacks = read_bool(s, "stop_after_attacks", false);
        } else {
            ctx.fail(s.line, "unknown section [" + s.name + "]");
        }
    }

    // Cross references.
    auto has_coin = [&](const std::string& label) {
        return std::any_of(setup.coins.begin(), setup.coins.end(),
                           [&](const CoinSetup& c) { return c.spec.label == label; });
    };
    for (const auto& m : setup.miners)
        if (!m.coin.empty() && !has_coin(m.coin))
            errors.push_back("miner " + m.name + ": references undeclared coin " + m.coin);
    for (const auto& p : setup.pools) {
        if (!has_coin(p.coin))
            errors.push_back("pool " + p.name + ": references undeclared coin " + p.coin);
        if (p.strategy == ManagerStrategy::CrossCoinRedirect && !has_coin(p.redirect_coin))
            errors.push_back("pool " + p.name + ": redirect_coin undeclared: " + p.redirect_coin);
    }
    for (const auto& p : setup.payments)
        if (!has_coin(p.coin))
            errors.push_back("payment: references undeclared coin " + p.coin);
    for (const auto& a : setup.attacks) {
        if (!has_coin(a.coin))
            errors.push_back("attack: references undeclared coin " + a.coin);
        if (a.type == AttackSetup::Type::HiddenFork) {
            bool found = std::any_of(setup.pools.begin(), setup.pools.end(),
                                     [&](const PoolSetup& p) { return p.name == a.pool; });
            if (!found)
                errors.push_back("attack: references undeclared pool " + a.pool);
        }
    }
    if (setup.coins.empty())
        errors.push_back("scenario declares no coins");
    return setup;
}

SimSetup parse_scenario(const std::string& path) {
    ScenarioDoc doc = parse_scenario_file(path);
    std::vector<std::string> errors;
    SimSetup setup = build_setup(doc, errors);
    if (!errors.empty()) {
        std::string msg = path + ": invalid scenario:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ParseError(msg);
    }
    return setup;
}

namespace {
std::string fmt(double d) {
    std::ostringstream ss;
    ss.precision(17);
    ss << d;
    return ss.str();
}
} // namespace

std::string serialize_scenario(const ScenarioDoc& doc) {
    std::ostringstream out;
    for (const auto& kv : doc.globals)
        out << kv.key << " = " << kv.value << "\n";
    for (const auto& s : doc.sections) {
        out << "\n[" << s.name << "]\n";
        for (const auto& kv : s.entries)
            out << kv.key << " = " << kv.value << "\n";
    }
    return out.str();
}

ScenarioDoc scenario_doc_from_setup(const SimSetup& setup) {
    ScenarioDoc doc;
    doc.set_global("name", setup.name);
    doc.set_global("master_seed", std::to_string(setup.master_seed));
    doc.set_global("duration", fmt(setup.duration));
    doc.set_global("metrics_interval", fmt(setup.metrics_interval));

    for (const auto& c : setup.coins) {
        ScenarioDoc::Section s;
        s.name = "coin";
        s.set("label", c.spec.label);
        s.set("hash_family", c.spec.hash_family);
        s.set("block_time", fmt(c.spec.block_time_target));
        s.set("retarget_interval", std::to_string(c.spec.retarget_interval));
        std::string sched;
        for (const auto& seg : c.spec.reward_schedule) {
            if (!sched.empty())
                sched += ",";
            sched += std::to_string(seg.from_height) + ":" + fmt(to_coins(seg.reward));
        }
        s.set("reward_schedule", sched);
        if (c.spec.max_supply)
            s.set("max_supply", fmt(to_coins(*c.spec.max_supply)));
        if (c.spec.merged_mining_parent)
            s.set("merged_parent", *c.spec.merged_mining_parent);
        s.set("initial_difficulty", fmt(c.initial_hashes_per_block));
        s.set("price", fmt(c.price.fixed_price));
        doc.sections.push_back(std::move(s));
    }
    {
        ScenarioDoc::Section s;
        s.name = "network";
        if (setup.latency.family == LatencyFamily::Lognormal) {
            s.set("latency", "lognormal");
            s.set("median", fmt(setup.latency.median));
            s.set("mean", fmt(setup.latency.mean));
        } else {
            s.set("latency", "fixed");
            s.set("delay", fmt(setup.latency.fixed_delay));
        }
        doc.sections.push_back(std::move(s));
    }
    if (setup.market.enabled) {
        ScenarioDoc::Section s;
        s.name = "market";
        s.set("enabled", "true");
        s.set("tick_interval", fmt(setup.market.market.tick_interval));
        s.set("responsiveness", fmt(setup.market.market.migration_responsiveness));
        s.set("hysteresis", fmt(setup.market.market.hysteresis));
        s.set("rental_hash", fmt(setup.market.market.rental_hash));
        s.set("rental_price", fmt(setup.market.market.rental_price));
        doc.sections.push_back(std::move(s));
    }
    for (const auto& m : setup.miners) {
        ScenarioDoc::Section s;
        s.name = "miner";
        s.set("name", m.name);
        s.set("hash_rate", fmt(m.hash_rate));
        s.set("coin", m.coin);
        s.set("electricity", fmt(m.electricity));
        s.set("migratory", m.migratory ? "true" : "false");
        s.set("accept_bribes", m.accept_bribes ? "true" : "false");
        s.set("count", std::to_string(m.count));
        doc.sections.push_back(std::move(s));
    }
    for (const auto& p : setup.pools) {
        ScenarioDoc::Section s;
        s.name = "pool";
        s.set("name", p.name);
        s.set("coin", p.coin);
        s.set("members", std::to_string(p.members));
        s.set("member_hash_rate", fmt(p.member_hash_rate));
        const char* strat = p.strategy == ManagerStrategy::Honest            ? "honest"
                            : p.strategy == ManagerStrategy::HiddenFork      ? "hidden_fork"
                            : p.strategy == ManagerStrategy::CrossCoinRedirect ? "cross_coin_redirect"
                                                                             : "cartel";
        s.set("strategy", strat);
        s.set("protocol", p.protocol == WorkProtocol::H0Only ? "h0_only" : "stratum_like");
        if (!p.redirect_coin.empty())
            s.set("redirect_coin", p.redirect_coin);
        doc.sections.push_back(std::move(s));
    }
    for (const auto& p : setup.peers) {
        ScenarioDoc::Section s;
        s.name = "peer";
        s.set("name", p.name);
        s.set("confirmer", p.confirmer ? "true" : "false");
        s.set("count", std::to_string(p.count));
        doc.sections.push_back(std::move(s));
    }
    for (const auto& p : setup.payments) {
        ScenarioDoc::Section s;
        s.name = "payment";
        s.set("coin", p.coin);
        s.set("amount", fmt(to_coins(p.amount)));
        s.set("at", fmt(p.at));
        doc.sections.push_back(std::move(s));
    }
    for (const auto& a : setup.attacks) {
        ScenarioDoc::Section s;
        s.name = "attack";
        s.set("type", a.type == AttackSetup::Type::DoubleSpend ? "double_spend" : "hidden_fork");
        s.set("coin", a.coin);
        if (!a.pool.empty())
            s.set("pool", a.pool);
        s.set("attacker_hash", fmt(a.attacker_hash));
        s.set("rented_fraction", fmt(a.rented_fraction));
        s.set("z_wait", std::to_string(a.z_wait));
        s.set("trigger", fmt(a.trigger));
        s.set("deadline", fmt(a.deadline));
        s.set("budget", fmt(a.budget));
        s.set("value", fmt(to_coins(a.value)));
        s.set("premium", fmt(a.premium));
        s.set("displace", a.displace ? "true" : "false");
        s.set("bribe", fmt(a.bribe));
        doc.sections.push_back(std::move(s));
    }
    {
        ScenarioDoc::Section s;
        s.name = "defense";
        s.set("variant", defense_variant_name(setup.variant));
        s.set("threshold", fmt(setup.adjudication_threshold));
        s.set("confirmer_depth", std::to_string(setup.confirmer_depth));
        s.set("confirmer_fee", fmt(to_coins(setup.confirmer_fee)));
        s.set("share_zeros", std::to_string(setup.share_evidence_zeros));
        doc.sections.push_back(std::move(s));
    }
    {
        ScenarioDoc::Section s;
        s.name = "engine";
        s.set("work_cadence", fmt(setup.work_cadence));
        s.set("record_traces", setup.record_traces ? "true" : "false");
        s.set("stop_after_attacks", setup.stop_after_attacks ? "true" : "false");
        doc.sections.push_back(std::move(s));
    }
    return doc;
}

} // namespace chainlab
