#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "ppl/approximations.hpp"
#include "ppl/arith_tables.hpp"
#include "ppl/config.hpp"
#include "ppl/exp_sums.hpp"
#include "ppl/io.hpp"
#include "ppl/pair_correlation.hpp"
#include "ppl/singular_series.hpp"
#include "ppl/summation.hpp"
#include "ppl/verify.hpp"

namespace {

using namespace ppl;

ArithTables tables_for(const RunConfig& cfg, std::uint64_t N) {
  return load_or_build_tables(N, cfg.cache_path.value_or(""));
}

void emit(const RunConfig& cfg, const json& j) {
  if (cfg.json_path) {
    emit_json(j, *cfg.json_path);
  } else {
    std::cout << to_json_text(j);
  }
}

void emit(const RunConfig& cfg, const CsvTable& t) {
  if (cfg.csv_path) {
    emit_csv(t, *cfg.csv_path);
  } else {
    std::cout << to_csv(t);
  }
}

int run_tables(const RunConfig& cfg) {
  const auto t = tables_for(cfg, cfg.n);
  const auto psi = chebyshev_psi(t, cfg.n);
  emit(cfg, json{{"N", cfg.n},
                 {"table_limit", t.limit()},
                 {"psi", json_number(psi.psi)},
                 {"remainder", json_number(psi.remainder)},
                 {"prime_count", std::upper_bound(t.primes().begin(), t.primes().end(), cfg.n) - t.primes().begin()},
                 {"cache", cfg.cache_path.value_or("")}});
  return 0;
}

int run_pairs(const RunConfig& cfg) {
  const auto t = tables_for(cfg, cfg.n);
  const auto pc = psi2(t, cfg.n, cfg.method);
  CsvTable tab;
  tab.header = {"k", "psi2"};
  for (std::uint64_t k = 0; k <= cfg.n; ++k) tab.add({std::to_string(k), format_number(pc.counts[k])});
  emit(cfg, tab);
  if (cfg.csv_path) {
    emit(cfg, json{{"N", cfg.n},
                   {"method", to_string(pc.method)},
                   {"transform_length", pc.transform_length},
                   {"max_imag", json_number(pc.max_imag)},
                   {"tolerance", json_number(pc.tolerance)}});
  }
  return 0;
}

int run_error(const RunConfig& cfg) {
  const auto t = tables_for(cfg, cfg.n);
  const auto c = compute_constants();
  const auto pc = psi2(t, cfg.n, cfg.method);
  const auto st = build_singular_table(cfg.n, t, c);
  const auto es = error_term(pc, st, c);
  const auto row = table1_row(es);
  if (cfg.table1) {
    std::cout << "N = " << cfg.n << "  E(N)/(N^2 log^2 N) = " << row.truncated << " (truncated)  full "
              << format_number(es.normalized) << (row.boundary_ambiguous ? "  [truncation boundary]" : "") << "\n";
  }
  json j{{"N", cfg.n},
         {"method", to_string(pc.method)},
         {"e_value", json_number(es.e_value)},
         {"normalized", json_number(es.normalized)},
         {"normalized_truncated", row.truncated},
         {"normalized_rounded", row.rounded},
         {"boundary_ambiguous", row.boundary_ambiguous},
         {"odd_contrib", json_number(es.odd_contrib)},
         {"first_moment_residual", json_number(es.first_moment_residual)}};
  if (!cfg.table1 || cfg.json_path) emit(cfg, j);
  return 0;
}

int run_figure(const RunConfig& cfg) {
  const auto c = compute_constants();
  CsvTable tab;
  if (cfg.which == 3) {
    const std::uint64_t last = cfg.n == 0 ? 1000 : cfg.n;
    const auto t = tables_for(cfg, last);
    const auto st = build_singular_table(last, t, c);
    tab.header = {"N", "normalized"};
    for (const auto& r : normalized_error_trend(t, st, c, 2, last)) {
      tab.add({std::to_string(r.N), format_number(r.normalized)});
    }
  } else {
    const std::uint64_t N = cfg.n == 0 ? 1000 : cfg.n;
    const auto t = tables_for(cfg, N);
    const auto pc = psi2_direct(t, N);
    const auto st = build_singular_table(N, t, c);
    const auto sN = static_cast<std::int64_t>(N);
    const auto rows = cfg.which == 1 ? figure_data(pc, st, 1, std::min<std::int64_t>(100, sN))
                                     : figure_data(pc, st, std::max<std::int64_t>(1, sN - 100), sN);
    tab.header = {"k", "psi2", "hl_prediction"};
    for (const auto& r : rows) tab.add({std::to_string(r.k), format_number(r.psi2), format_number(r.hl_prediction)});
  }
  emit(cfg, tab);
  return 0;
}

int run_l1(const RunConfig& cfg) {
  const auto t = tables_for(cfg, cfg.n);
  const auto r = l1_of_S(t, cfg.n, cfg.m);
  emit(cfg, json{{"N", cfg.n},
                 {"M", r.norms.M_used},
                 {"l1", json_number(r.norms.l1)},
                 {"l1_error_bound", json_number(r.norms.l1_error_bound)},
                 {"l2sq", json_number(r.norms.l2sq)},
                 {"l1_over_sqrt_NlogN", json_number(r.ratio_sqrt_nlogn)},
                 {"l1_over_sqrtN", json_number(r.ratio_sqrt_n)}});
  return 0;
}

int run_majorarc(const RunConfig& cfg) {
  const auto t = tables_for(cfg, cfg.n);
  const auto c = compute_constants();
  const auto q = major_arc(t, cfg.n, cfg.y, c, true);
  emit(cfg, json{{"N", q.N},
                 {"y", json_number(q.y)},
                 {"a0", json_number(q.a0)},
                 {"a0_ratio", json_number(q.a0_ratio)},
                 {"W", json_number(q.W)},
                 {"W_asymptotic", json_number(q.W_asymptotic)},
                 {"J", json_number(q.J)},
                 {"T", json_number(q.T)},
                 {"E", json_number(q.e_value)},
                 {"variance_bound",
                  {{"lower_bound", json_number(q.variance_bound.lower_bound)},
                   {"slack", json_number(q.variance_bound.slack)},
                   {"holds", q.variance_bound.holds}}}});
  return 0;
}

int run_approx(const RunConfig& cfg) {
  const auto t = tables_for(cfg, cfg.n);
  const auto a = cfg.kind == approx_kind::lambda_R ? lambda_R_table(t, cfg.n, cfg.r)
                                                   : lambda_refined_table(t, cfg.n, cfg.r);
  if (cfg.csv_path) {
    CsvTable tab;
    tab.header = {"n", to_string(a.kind)};
    for (std::uint64_t n = 1; n <= cfg.n; ++n) tab.add({std::to_string(n), format_number(a.values[n])});
    emit(cfg, tab);
  }
  json j{{"N", cfg.n}, {"R", json_number(cfg.r)}, {"kind", to_string(a.kind)},
         {"l2_distance", json_number(l2_distance(t, a))}};
  if (cfg.moments) {
    json m = json::object();
    for (const auto& e : moment_suite(t, a).entries) {
      m[e.name] = {{"sum", json_number(e.sum)},
                   {"main_term", json_number(e.main_term)},
                   {"residual_over_N", json_number(e.residual_over_N)}};
    }
    j["moments"] = m;
  }
  if (cfg.l1) {
    const auto r = l1_approx_sums(t, cfg.n, cfg.r, cfg.m);
    auto norms = [](const NormEstimates& ne) {
      return json{{"l1", json_number(ne.l1)}, {"l1_error_bound", json_number(ne.l1_error_bound)}, {"M", ne.M_used}};
    };
    j["l1"] = {{"S_R", norms(r.S_R)},
               {"refined", norms(r.curly_SR)},
               {"S_R_over_RlogN", json_number(r.ratio_S_R)},
               {"refined_over_RlogN", json_number(r.ratio_curly)}};
  }
  emit(cfg, j);
  return 0;
}

int run_constants(const RunConfig& cfg) {
  const auto c = compute_constants(cfg.cutoff);
  emit(cfg, json{{"cutoff", c.prime_cutoff},
                 {"C2", json_number(c.c2)},
                 {"L", json_number(c.lconst)},
                 {"M", json_number(c.mconst)},
                 {"D", json_number(c.dconst)},
                 {"tail_bounds",
                  {{"C2", json_number(c.c2_tail)},
                   {"L", json_number(c.l_tail)},
                   {"M", json_number(c.m_tail)},
                   {"D", json_number(c.d_tail)}}},
                 {"tail_bound", json_number(c.tail_bound)}});
  return 0;
}

int run_verify_cmd(const RunConfig& cfg) {
  const auto rep = run_verify(cfg);
  for (const auto& e : rep.entries) {
    std::fprintf(stderr, "%-12s %-40s measured=%-14s threshold=%-12s %s\n", to_string(e.status), e.name.c_str(),
                 format_number(e.measured).c_str(), format_number(e.threshold).c_str(), e.detail.c_str());
  }
  json j = rep.to_json();
  json env = json::object();
  for (const auto& [k, v] : cfg.envelopes) env[k] = json_number(v);
  j["envelopes"] = env;
  j["mode"] = cfg.fast ? "fast" : cfg.full ? "full" : "default";
  emit(cfg, j);
  return rep.passed() ? 0 : static_cast<int>(exit_code::check_failed);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const auto cfg = parse_args(std::vector<std::string>(argv + 1, argv + argc));
    if (cfg.help) {
      std::cout << cfg.help_text;
      return 0;
    }
    set_thread_count(cfg.threads);
    switch (cfg.cmd) {
      case command::tables: return run_tables(cfg);
      case command::pairs: return run_pairs(cfg);
      case command::error: return run_error(cfg);
      case command::figure: return run_figure(cfg);
      case command::l1: return run_l1(cfg);
      case command::majorarc: return run_majorarc(cfg);
      case command::approx: return run_approx(cfg);
      case command::constants: return run_constants(cfg);
      case command::verify: return run_verify_cmd(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "ppl: " << e.what() << "\n";
    return exit_status_for(e);
  }
  return 0;
}
