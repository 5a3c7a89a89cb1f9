#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppl/config.hpp"
#include "ppl/io.hpp"
#include "ppl/verify.hpp"

using namespace ppl;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int code_of(const std::vector<std::string>& args) {
  try {
    parse_args(args);
    return 0;
  } catch (const std::exception& e) {
    return exit_status_for(e);
  }
}

}  // namespace

TEST(ParseArgs, ErrorTable1) {
  const auto c = parse_args({"error", "--n", "1000", "--table1"});
  EXPECT_EQ(c.cmd, command::error);
  EXPECT_EQ(c.n, 1000u);
  EXPECT_TRUE(c.table1);
  EXPECT_EQ(c.envelopes.size(), envelope_defaults().size());
}

TEST(ParseArgs, L1DefaultsToPolicyGrid) {
  const auto c = parse_args({"l1", "--n", "4096"});
  EXPECT_EQ(c.cmd, command::l1);
  EXPECT_EQ(c.m, 0u);  // resolved by default_l1_grid at run time
}

TEST(ParseArgs, UsageErrors) {
  EXPECT_THROW(parse_args({"error", "--n", "0"}), usage_error);
  EXPECT_EQ(code_of({"error", "--n", "0"}), 2);
  EXPECT_EQ(code_of({}), 2);
  EXPECT_EQ(code_of({"nope"}), 2);
  EXPECT_EQ(code_of({"error"}), 2);
  EXPECT_EQ(code_of({"pairs", "--n", "20000", "--method", "direct"}), 2);
  EXPECT_EQ(code_of({"pairs", "--n", "20", "--method", "slow"}), 2);
  EXPECT_EQ(code_of({"l1", "--n", "4096", "--m", "1000"}), 2);
  EXPECT_EQ(code_of({"majorarc", "--n", "100", "--y", "200"}), 2);
  EXPECT_EQ(code_of({"approx", "--n", "100", "--r", "0.5"}), 2);
  EXPECT_EQ(code_of({"approx", "--n", "100", "--r", "20", "--kind", "refined", "--moments"}), 2);
  EXPECT_EQ(code_of({"constants", "--cutoff", "10"}), 2);
  EXPECT_EQ(code_of({"--threads", "0", "verify"}), 2);
  EXPECT_EQ(code_of({"verify", "--fast", "--full"}), 2);
  EXPECT_EQ(code_of({"--envelope", "nosuch=1", "verify"}), 2);
  EXPECT_EQ(code_of({"--envelope", "hl_residual", "verify"}), 2);
  EXPECT_EQ(code_of({"--envelope", "hl_residual=abc", "verify"}), 2);
}

TEST(ParseArgs, EnvelopesAndGlobals) {
  const auto c = parse_args({"--threads", "3", "--envelope", "hl_residual=0.001", "--envelope", "gap=1.5",
                             "--json", "out.json", "--cache", "t.bin", "verify", "--fast"});
  EXPECT_EQ(c.threads, 3u);
  EXPECT_DOUBLE_EQ(c.envelope("hl_residual"), 0.001);
  EXPECT_DOUBLE_EQ(c.envelope("gap"), 1.5);
  EXPECT_DOUBLE_EQ(c.envelope("moment"), 5.0);
  EXPECT_EQ(c.json_path.value(), "out.json");
  EXPECT_EQ(c.cache_path.value(), "t.bin");
  EXPECT_TRUE(c.fast);
}

TEST(ParseArgs, MajorArcDefaultsY) {
  const auto c = parse_args({"majorarc", "--n", "10000"});
  EXPECT_DOUBLE_EQ(c.y, 100.0);
}

TEST(ParseArgs, Help) {
  const auto c = parse_args({"--help"});
  EXPECT_TRUE(c.help);
  EXPECT_NE(c.help_text.find("verify"), std::string::npos);
}

TEST(ExitStatus, Mapping) {
  EXPECT_EQ(exit_status_for(usage_error("x")), 2);
  EXPECT_EQ(exit_status_for(capacity_error("x")), 3);
  EXPECT_EQ(exit_status_for(io_error("x")), 3);
  EXPECT_EQ(exit_status_for(range_error("x")), 2);
  EXPECT_EQ(static_cast<int>(exit_code::check_failed), 1);
}

TEST(Csv, HeaderOnlyAndQuoting) {
  CsvTable t;
  t.header = {"k", "psi2", "hl_prediction"};
  EXPECT_EQ(to_csv(t), "k,psi2,hl_prediction\r\n");
  t.add({"1", "a,b", "say \"hi\""});
  EXPECT_EQ(to_csv(t), "k,psi2,hl_prediction\r\n1,\"a,b\",\"say \"\"hi\"\"\"\r\n");
  EXPECT_THROW(t.add({"1"}), domain_error);
}

TEST(Csv, EmitToFileAndIoError) {
  CsvTable t;
  t.header = {"n"};
  t.add({format_number(1.0 / 3.0)});
  const auto path = (std::filesystem::temp_directory_path() / "ppl_test.csv").string();
  emit_csv(t, path);
  EXPECT_EQ(slurp(path), "n\r\n0.333333333333\r\n");
  std::filesystem::remove(path);
  EXPECT_THROW(emit_csv(t, "/nonexistent/dir/x.csv"), io_error);
}

TEST(Json, SortedKeysAndTwelveDigits) {
  json j{{"zeta", json_number(2.0 / 3.0)}, {"alpha", json_number(123456.789012345678)}, {"nan", json_number(NAN)}};
  const auto s = to_json_text(j);
  EXPECT_LT(s.find("alpha"), s.find("nan"));
  EXPECT_LT(s.find("nan"), s.find("zeta"));
  EXPECT_NE(s.find("0.666666666667"), std::string::npos);
  EXPECT_NE(s.find("123456.789012"), std::string::npos);
  EXPECT_NE(s.find("null"), std::string::npos);
}

TEST(NumberFormat, TwelveSignificant) {
  EXPECT_EQ(format_number(0.094644491317), "0.094644491317");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(std::uint64_t{12345678901234}), "12345678901234");
}

TEST(Determinism, FigureCsvStableAcrossThreads) {
  const auto t = build_tables(2000);
  const auto c = compute_constants(100'000);
  set_thread_count(1);
  const auto a = figure_csv_text(t, c, 1, 100);
  const auto b = figure_csv_text(t, c, 1, 100);
  set_thread_count(4);
  const auto d = figure_csv_text(t, c, 1, 100);
  set_thread_count(1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  EXPECT_EQ(a.substr(0, a.find('\r')), "k,psi2,hl_prediction");
}

TEST(Verify, EnvelopePlumbingFailsFirstMoment) {
  const auto t = build_tables(20'000);
  const auto c = compute_constants(100'000);
  auto cfg = parse_args({"--envelope", "hl_residual=0.001", "verify"});
  VerifyContext cx{t, c, cfg};
  VerifyReport rep;
  check_first_moment(rep, cx, {1000});
  EXPECT_EQ(rep.find("pair.first_moment_identity")->status, check_status::pass);
  EXPECT_EQ(rep.find("pair.first_moment_hl_residual")->status, check_status::fail);
  EXPECT_FALSE(rep.passed());

  const auto dflt = parse_args({"verify"});
  VerifyContext cx2{t, c, dflt};
  VerifyReport ok;
  check_first_moment(ok, cx2, {1000});
  EXPECT_TRUE(ok.passed());
}

TEST(Verify, ReportOnlyNeverFails) {
  VerifyReport rep;
  rep.report("x", 100.0, 1.0, provenance::empirical);
  EXPECT_TRUE(rep.passed());
  rep.add("y", false, 1.0, 0.0, provenance::identity);
  EXPECT_FALSE(rep.passed());
  const auto j = rep.to_json();
  EXPECT_EQ(j["checks"][0]["status"], "report-only");
  EXPECT_EQ(j["passed"], false);
}

TEST(Verify, FastRunPassesWithUniqueNames) {
  const auto cfg = parse_args({"verify", "--fast"});
  const auto rep = run_verify(cfg);
  std::set<std::string> names;
  for (const auto& e : rep.entries) {
    EXPECT_TRUE(names.insert(e.name).second) << e.name;
    EXPECT_NE(e.status, check_status::fail) << e.name << ": " << e.detail;
  }
  // One entry per listed invariant, plus the desk-scale examples.
  for (const char* n : {"arith.ramanujan_closed_vs_direct", "arith.ramanujan_at_zero_is_totient",
                        "arith.ramanujan_multiplicative", "arith.mangoldt_square_sum", "singular.truncated_converges",
                        "singular.odd_squarefree_kernel", "singular.log_envelope", "singular.constants_stability",
                        "pair.fft_matches_direct", "pair.first_moment_identity", "pair.odd_k_structure",
                        "pair.table1_N1000", "exp.exact_quadrature", "exp.fourier_roundtrip",
                        "exp.dirichlet_kernel_bound", "exp.l1_grid_halving", "exp.vaughan_bands",
                        "approx.dual_form_exact", "approx.truncation_identity", "approx.parseval_bridge",
                        "approx.refinement_gap", "approx.L_equals_truncated_zero", "io.deterministic_output",
                        "io.cache_roundtrip", "io.exit_code_contract"}) {
    EXPECT_NE(rep.find(n), nullptr) << n;
  }
  EXPECT_TRUE(rep.passed());
}
