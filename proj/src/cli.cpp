#include "totcensus/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "totcensus/census.hpp"
#include "totcensus/classifier.hpp"
#include "totcensus/prime_engine.hpp"
#include "totcensus/totient_core.hpp"

namespace totcensus {

namespace {

using nlohmann::json;

constexpr uint64_t kDefaultCheckpoints[] = {1002, 10002, 100002, 1000002};
constexpr uint64_t kLongRunCheckpoints[] = {10000002, 100000002};

struct CommonOpts {
    std::string format = "text";
    std::string out_path;
    unsigned threads = 0;
    // default keeps runaway oracle requests failing cleanly (exit 3)
    // instead of thrashing; 0 lifts the cap
    uint64_t memory_budget = uint64_t{8} << 30;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_threads = false) {
    cmd->add_option("--format", o.format, "Output format: text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--out", o.out_path, "Write output to this file instead of stdout");
    if (with_threads)
        cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--memory-budget", o.memory_budget,
                    "Memory budget in bytes for big allocations (0 = unlimited, default 8 GiB)");
}

void emit(const CommonOpts& o, const std::string& text, std::ostream& out) {
    if (o.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + o.out_path);
    f << text;
}

json ratio_json(const Ratio& r) {
    return {{"num", r.num}, {"den", r.den}, {"display", ratio_decimal_truncated(r)}};
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// ---- census ----

json census_row_json(const CensusRow& r) {
    return {{"x", r.x},
            {"pi", r.pi},
            {"t0", r.t0},
            {"t2", r.t2},
            {"t4", r.t4},
            {"t2_prime", r.t2_prime},
            {"t2_power", r.t2_power},
            {"m2_excluded", r.m2_excluded},
            {"t2_over_pi", ratio_json(r.t2_over_pi())},
            {"t4_over_t2", ratio_json(r.t4_over_t2())}};
}

std::string census_text(std::span<const CensusRow> rows) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%12s %10s %10s %10s %6s %10s %10s\n",
                  "x", "pi", "t0", "t2", "t4", "t2/pi", "t4/t2");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%12llu %10llu %10llu %10llu %6llu %10s %10s\n",
                      static_cast<unsigned long long>(r.x),
                      static_cast<unsigned long long>(r.pi),
                      static_cast<unsigned long long>(r.t0),
                      static_cast<unsigned long long>(r.t2),
                      static_cast<unsigned long long>(r.t4),
                      ratio_decimal_truncated(r.t2_over_pi()).c_str(),
                      ratio_decimal_truncated(r.t4_over_t2()).c_str());
        out += buf;
    }
    out += "note: m = 2 (multiplicity 3) is excluded from t2/t4 at every checkpoint\n";
    return out;
}

// ---- classification records ----

json record_json(const ClassificationRecord& rec) {
    json j{{"m", rec.m},
           {"multiplicity", rec.multiplicity},
           {"preimage", rec.preimage},
           {"exceptional", rec.exceptional}};
    j["prime_certificate"] = rec.prime_certificate ? json(*rec.prime_certificate) : json();
    if (rec.power_certificate)
        j["power_certificate"] = {{"q", rec.power_certificate->first},
                                  {"e", rec.power_certificate->second}};
    else
        j["power_certificate"] = nullptr;
    return j;
}

std::string join_u64(std::span<const uint64_t> v, const char* sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

std::string record_text(const ClassificationRecord& rec) {
    std::string s;
    s += "m              " + std::to_string(rec.m) + "\n";
    s += "multiplicity   " + std::to_string(rec.multiplicity) + "\n";
    s += "preimage       {" + join_u64(rec.preimage, ", ") + "}\n";
    s += "prime cert     " +
         (rec.prime_certificate ? std::to_string(*rec.prime_certificate) : "-") + "\n";
    s += "power cert     " +
         (rec.power_certificate ? std::to_string(rec.power_certificate->first) + "^" +
                                      std::to_string(rec.power_certificate->second)
                                : "-") +
         "\n";
    if (rec.exceptional) s += "exceptional    yes (4 = 2^2 joins the preimage)\n";
    return s;
}

std::string record_csv(const ClassificationRecord& rec) {
    std::string s = "m,multiplicity,preimage,prime_certificate,power_q,power_e,exceptional\n";
    s += std::to_string(rec.m) + ',' + std::to_string(rec.multiplicity) + ',' +
         join_u64(rec.preimage, ";") + ',' +
         (rec.prime_certificate ? std::to_string(*rec.prime_certificate) : "") + ',' +
         (rec.power_certificate ? std::to_string(rec.power_certificate->first) : "") + ',' +
         (rec.power_certificate ? std::to_string(rec.power_certificate->second) : "") + ',' +
         (rec.exceptional ? "1" : "0") + '\n';
    return s;
}

// ---- oracle cache ----

MultiplicityTable oracle_with_cache(uint64_t x, bool keep, uint64_t budget,
                                    std::ostream& err) {
    const char* dir = std::getenv("TOTCENSUS_CACHE_DIR");
    std::string path;
    if (dir && *dir) {
        path = std::string(dir) + "/multtable-x" + std::to_string(x) +
               (keep ? "-pre" : "-cnt") + ".bin";
        try {
            MultiplicityTable t = MultiplicityTable::load_file(path);
            if (t.x() == x && (!keep || t.has_preimages())) return t;
        } catch (const std::exception&) {
            // missing or stale cache; recompute below
        }
    }
    MultiplicityTable t = multiplicity_oracle(x, keep, budget);
    if (!path.empty()) {
        try {
            t.save_file(path);
        } catch (const std::exception& e) {
            err << "warning: could not write oracle cache: " << e.what() << "\n";
        }
    }
    return t;
}

// ---- subcommand runners ----

std::vector<uint64_t> resolve_checkpoints(const std::vector<uint64_t>& explicit_cps,
                                          uint64_t max_x, bool long_run) {
    std::vector<uint64_t> cps;
    if (!explicit_cps.empty() && max_x != 0)
        throw CLI::ValidationError("census", "--checkpoints and --max are mutually exclusive");
    if (!explicit_cps.empty())
        cps = explicit_cps;
    else if (max_x != 0)
        cps = {max_x};
    else
        cps.assign(std::begin(kDefaultCheckpoints), std::end(kDefaultCheckpoints));
    if (long_run)
        for (uint64_t x : kLongRunCheckpoints)
            if (cps.empty() || x > cps.back()) cps.push_back(x);
    return cps;
}

void run_census(const std::vector<uint64_t>& cps, const CommonOpts& o, std::ostream& out) {
    CensusOptions copts;
    copts.threads = o.threads;
    copts.memory_budget_bytes = o.memory_budget;
    auto rows = totient_census(cps, copts);
    if (o.format == "csv") {
        emit(o, census_csv(rows), out);
    } else if (o.format == "json") {
        json j = json::array();
        for (const auto& r : rows) j.push_back(census_row_json(r));
        emit(o, j.dump(2) + "\n", out);
    } else {
        emit(o, census_text(rows), out);
    }
}

void run_report(const std::vector<uint64_t>& cps, const CommonOpts& o,
                const std::string& plot_out, std::ostream& out) {
    CensusOptions copts;
    copts.threads = o.threads;
    copts.memory_budget_bytes = o.memory_budget;
    auto rows = ratio_report(cps, copts);
    std::string body;
    if (o.format == "csv") {
        body = report_csv(rows);
    } else if (o.format == "json") {
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"x", r.x},
                         {"pi", r.pi},
                         {"t2", r.t2},
                         {"t4", r.t4},
                         {"t2_prime", r.t2_prime},
                         {"t2_power", r.t2_power},
                         {"pi_4_3", r.pi_4_3},
                         {"t2_over_pi", ratio_json(r.t2_over_pi)},
                         {"dist_half", ratio_json(r.dist_half)},
                         {"t4_over_t2", ratio_json(r.t4_over_t2)},
                         {"t4_over_sqrt", r.t4_over_sqrt},
                         {"pi43_over_pi", ratio_json(r.pi43_over_pi)}});
        body = j.dump(2) + "\n";
    } else {
        char buf[200];
        std::snprintf(buf, sizeof(buf), "%12s %10s %10s %6s %10s %10s %10s %10s %10s\n",
                      "x", "pi", "t2", "t4", "t2/pi", "|.-1/2|", "t4/t2", "t4/sqrt(x)",
                      "pi43/pi");
        body += buf;
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%12llu %10llu %10llu %6llu %10s %10s %10s %10s %10s\n",
                          static_cast<unsigned long long>(r.x),
                          static_cast<unsigned long long>(r.pi),
                          static_cast<unsigned long long>(r.t2),
                          static_cast<unsigned long long>(r.t4),
                          ratio_decimal_truncated(r.t2_over_pi).c_str(),
                          ratio_decimal_truncated(r.dist_half).c_str(),
                          ratio_decimal_truncated(r.t4_over_t2).c_str(),
                          fixed6(r.t4_over_sqrt).c_str(),
                          ratio_decimal_truncated(r.pi43_over_pi).c_str());
            body += buf;
        }
        body += "t2 split (prime-preimage + power-preimage):\n";
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%12llu  t2 = %llu + %llu\n",
                          static_cast<unsigned long long>(r.x),
                          static_cast<unsigned long long>(r.t2_prime),
                          static_cast<unsigned long long>(r.t2_power));
            body += buf;
        }
        // exact-rational monotonicity of t2/pi across the checkpoints
        bool decreasing = true;
        for (size_t i = 1; i < rows.size(); ++i) {
            auto a = rows[i].t2_over_pi, b = rows[i - 1].t2_over_pi;
            if (static_cast<unsigned __int128>(a.num) * b.den >=
                static_cast<unsigned __int128>(b.num) * a.den)
                decreasing = false;
        }
        if (rows.size() > 1)
            body += std::string("trend: t2/pi strictly decreasing toward 1/2: ") +
                    (decreasing ? "yes" : "no") + "\n";
        body += "\n" + report_plot_data(rows);
    }
    emit(o, body, out);
    if (!plot_out.empty()) {
        std::ofstream f(plot_out, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open plot file " + plot_out);
        f << report_plot_data(rows);
    }
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"census of Euler totients 2 (mod 4): classification, counts, ratios"};
    app.require_subcommand(1);

    // census
    auto* census_cmd = app.add_subcommand("census", "Count T0/T2/T4 at checkpoints");
    std::vector<uint64_t> census_cps;
    uint64_t census_max = 0;
    bool census_long = false;
    CommonOpts census_opts;
    census_cmd->add_option("--checkpoints", census_cps, "Comma-separated checkpoint list")
        ->delimiter(',');
    census_cmd->add_option("--max", census_max, "Single checkpoint shorthand");
    census_cmd->add_flag("--long-run", census_long, "Append the 10^7+2 and 10^8+2 checkpoints");
    add_common(census_cmd, census_opts, true);

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Classify one m = 2 (mod 4)");
    uint64_t classify_m = 0;
    CommonOpts classify_opts;
    classify_cmd->add_option("m", classify_m, "Value to classify")->required();
    add_common(classify_cmd, classify_opts);

    // preimage
    auto* preimage_cmd = app.add_subcommand("preimage", "List phi^-1(m)");
    uint64_t preimage_m = 0;
    CommonOpts preimage_opts;
    preimage_cmd->add_option("m", preimage_m, "Totient value")->required();
    add_common(preimage_cmd, preimage_opts);

    // pairs
    auto* pairs_cmd = app.add_subcommand("pairs", "Census of consecutive totients 2 (mod 4)");
    uint64_t pairs_max = 0, pairs_gap = 4;
    CommonOpts pairs_opts;
    pairs_cmd->add_option("--max", pairs_max, "Upper bound x")->required();
    pairs_cmd->add_option("--gap", pairs_gap, "Pair gap (multiple of 4)");
    add_common(pairs_cmd, pairs_opts);

    // rt
    auto* rt_cmd = app.add_subcommand("rt", "Census of odd-prime-power totients R_t");
    uint64_t rt_max = 0;
    uint32_t rt_t = 1;
    CommonOpts rt_opts;
    rt_cmd->add_option("--max", rt_max, "Upper bound x")->required();
    rt_cmd->add_option("--t", rt_t, "Exponent parameter t (witnesses use exponent >= t+1)");
    add_common(rt_cmd, rt_opts);

    // vkl
    auto* vkl_cmd = app.add_subcommand("vkl", "Census of multiplicity-k totients V_k / V_k^l");
    uint64_t vkl_max = 0, vkl_k = 2;
    uint32_t vkl_l = 2;
    CommonOpts vkl_opts;
    vkl_cmd->add_option("--max", vkl_max, "Upper bound x")->required();
    vkl_cmd->add_option("--k", vkl_k, "Multiplicity k");
    vkl_cmd->add_option("--l", vkl_l, "Prime-power exponent threshold l (>= 2)");
    add_common(vkl_cmd, vkl_opts);

    // report
    auto* report_cmd = app.add_subcommand("report", "Convergence report for the census ratios");
    std::vector<uint64_t> report_cps;
    uint64_t report_max = 0;
    bool report_long = false;
    std::string report_plot;
    CommonOpts report_opts;
    report_cmd->add_option("--checkpoints", report_cps, "Comma-separated checkpoint list")
        ->delimiter(',');
    report_cmd->add_option("--max", report_max, "Single checkpoint shorthand");
    report_cmd->add_flag("--long-run", report_long, "Append the 10^7+2 and 10^8+2 checkpoints");
    report_cmd->add_option("--plot-out", report_plot,
                           "Also write the gnuplot two-column data (x, t2/pi) to this file");
    add_common(report_cmd, report_opts, true);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));

        if (*census_cmd) {
            run_census(resolve_checkpoints(census_cps, census_max, census_long),
                       census_opts, out);
        } else if (*classify_cmd) {
            auto rec = classify_2mod4(classify_m);
            if (classify_opts.format == "json")
                emit(classify_opts, record_json(rec).dump(2) + "\n", out);
            else if (classify_opts.format == "csv")
                emit(classify_opts, record_csv(rec), out);
            else
                emit(classify_opts, record_text(rec), out);
        } else if (*preimage_cmd) {
            uint64_t m = preimage_m;
            uint64_t multiplicity;
            std::vector<uint64_t> pre;
            if (m >= 2 && m % 4 == 2) {
                auto rec = classify_2mod4(m);
                multiplicity = rec.multiplicity;
                pre = rec.preimage;
            } else {
                if (m < 1) throw std::domain_error("preimage: m must be >= 1");
                auto table = oracle_with_cache(m, true, preimage_opts.memory_budget, err);
                multiplicity = table.multiplicity(m);
                pre = table.preimages(m);
            }
            if (preimage_opts.format == "json") {
                json j{{"m", m}, {"multiplicity", multiplicity}, {"preimage", pre}};
                emit(preimage_opts, j.dump(2) + "\n", out);
            } else if (preimage_opts.format == "csv") {
                emit(preimage_opts,
                     "m,multiplicity,preimage\n" + std::to_string(m) + ',' +
                         std::to_string(multiplicity) + ',' + join_u64(pre, ";") + '\n',
                     out);
            } else {
                emit(preimage_opts,
                     "A(" + std::to_string(m) + ") = " + std::to_string(multiplicity) +
                         "\nphi^-1 = {" + join_u64(pre, ", ") + "}\n",
                     out);
            }
        } else if (*pairs_cmd) {
            auto row = pair_census(pairs_max, pairs_gap);
            if (pairs_opts.format == "json") {
                json j{{"x", row.x},           {"gap", row.gap},
                       {"c", row.c},           {"c1", row.c1},
                       {"c2", row.c2},         {"c_over_sqrt", row.c_over_sqrt},
                       {"c_members", row.c_members}, {"c1_members", row.c1_members},
                       {"c2_members", row.c2_members}};
                emit(pairs_opts, j.dump(2) + "\n", out);
            } else if (pairs_opts.format == "csv") {
                emit(pairs_opts,
                     "x,gap,c,c1,c2,c_over_sqrt\n" + std::to_string(row.x) + ',' +
                         std::to_string(row.gap) + ',' + std::to_string(row.c) + ',' +
                         std::to_string(row.c1) + ',' + std::to_string(row.c2) + ',' +
                         fixed6(row.c_over_sqrt) + '\n',
                     out);
            } else {
                std::string s;
                s += "x = " + std::to_string(row.x) + ", gap = " + std::to_string(row.gap) + "\n";
                s += "|C|  = " + std::to_string(row.c) + "  {" + join_u64(row.c_members, ", ") + "}\n";
                s += "|C1| = " + std::to_string(row.c1) + "\n";
                s += "|C2| = " + std::to_string(row.c2) + "\n";
                s += "|C|/sqrt(x) = " + fixed6(row.c_over_sqrt) + "\n";
                emit(pairs_opts, s, out);
            }
        } else if (*rt_cmd) {
            auto row = rt_census(rt_max, rt_t);
            if (rt_opts.format == "json") {
                json j{{"x", row.x},
                       {"t", row.t},
                       {"rt", row.rt},
                       {"rt_over_root", row.rt_over_root},
                       {"rt_over_pi_root", ratio_json(row.rt_over_pi_root)},
                       {"values", row.values}};
                emit(rt_opts, j.dump(2) + "\n", out);
            } else if (rt_opts.format == "csv") {
                emit(rt_opts,
                     "x,t,rt,rt_over_root,rt_over_pi_root\n" + std::to_string(row.x) + ',' +
                         std::to_string(row.t) + ',' + std::to_string(row.rt) + ',' +
                         fixed6(row.rt_over_root) + ',' +
                         ratio_decimal_truncated(row.rt_over_pi_root) + '\n',
                     out);
            } else {
                std::string s;
                s += "|R_" + std::to_string(row.t) + "(" + std::to_string(row.x) +
                     ")| = " + std::to_string(row.rt) + "\n";
                s += "values: {" + join_u64(row.values, ", ") + "}\n";
                s += "rt / x^(1/t)      = " + fixed6(row.rt_over_root) + "\n";
                s += "rt / pi(x^(1/t))  = " + ratio_decimal_truncated(row.rt_over_pi_root) + "\n";
                emit(rt_opts, s, out);
            }
        } else if (*vkl_cmd) {
            auto row = vkl_census(vkl_max, vkl_k, vkl_l, vkl_opts.memory_budget);
            if (vkl_opts.format == "json") {
                json j{{"x", row.x},   {"k", row.k},   {"l", row.l},
                       {"vkl", row.vkl}, {"vk", row.vk}, {"ratio", ratio_json(row.ratio)}};
                emit(vkl_opts, j.dump(2) + "\n", out);
            } else if (vkl_opts.format == "csv") {
                emit(vkl_opts,
                     "x,k,l,vkl,vk,ratio\n" + std::to_string(row.x) + ',' +
                         std::to_string(row.k) + ',' + std::to_string(row.l) + ',' +
                         std::to_string(row.vkl) + ',' + std::to_string(row.vk) + ',' +
                         ratio_decimal_truncated(row.ratio) + '\n',
                     out);
            } else {
                std::string s;
                s += "|V_" + std::to_string(row.k) + "(" + std::to_string(row.x) +
                     ")|   = " + std::to_string(row.vk) + "\n";
                s += "|V_" + std::to_string(row.k) + "^" + std::to_string(row.l) +
                     "(" + std::to_string(row.x) + ")| = " + std::to_string(row.vkl) + "\n";
                s += "ratio = " + ratio_decimal_truncated(row.ratio) + "\n";
                emit(vkl_opts, s, out);
            }
        } else if (*report_cmd) {
            run_report(resolve_checkpoints(report_cps, report_max, report_long),
                       report_opts, report_plot, out);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const resource_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace totcensus
