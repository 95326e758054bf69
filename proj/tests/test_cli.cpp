#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "clentropy/cli.hpp"
#include "json.hpp"

namespace report = clentropy::report;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cl-entropy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = clentropy::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, EntropyRecord) {
  const auto r = run({"entropy", "--p", "2", "--u", "0", "--eps", "1e-6", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u);
  const auto j = nlohmann::json::parse(ls[0]);
  EXPECT_EQ(j["command"], "entropy");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_LE(j["value_hi"].get<double>() - j["value_lo"].get<double>(), 1e-6);
  EXPECT_LE(j["value_lo"].get<double>(), j["value_hi"].get<double>());
}

TEST(Cli, EntropyOneRecordPerPair) {
  const auto r = run({"entropy", "--p", "2", "3", "--u", "1", "2", "--eps", "1e-4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 4u);
}

TEST(Cli, EntropyLargeUnitRank) {
  const auto r = run({"entropy", "--p", "2", "--u", "30", "--eps", "1e-6"});
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(nlohmann::json::parse(r.out)["value_hi"].get<double>(), 1e-6);
}

TEST(Cli, UsageErrors) {
  const auto bad_prime = run({"entropy", "--p", "4", "--u", "0"});
  EXPECT_EQ(bad_prime.code, 2);
  EXPECT_NE(bad_prime.err.find("4 is not prime"), std::string::npos);
  EXPECT_TRUE(bad_prime.out.empty());
  EXPECT_EQ(run({"entropy", "--p", "101"}).code, 2);
  EXPECT_EQ(run({"entropy", "--u", "-1"}).code, 2);
  EXPECT_EQ(run({"entropy", "--eps", "1"}).code, 2);
  EXPECT_EQ(run({"entropy", "--eps", "1e-13"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "entropy"}).code, 2);
  EXPECT_EQ(run({"table", "--max-order-exponent", "21"}).code, 2);
  EXPECT_EQ(run({"kl", "--mode", "sideways"}).code, 2);
}

TEST(Cli, KlBoth) {
  const auto zero = run({"kl", "--p", "2", "--u1", "0", "--u2", "0", "--mode", "both"});
  ASSERT_EQ(zero.code, 0);
  const auto ls = lines(zero.out);
  ASSERT_EQ(ls.size(), 2u);
  for (const auto& l : ls) {
    const auto j = nlohmann::json::parse(l);
    EXPECT_LE(j["value_lo"].get<double>(), 0.0);
    EXPECT_GE(j["value_hi"].get<double>(), 0.0);
    EXPECT_EQ(j["overlap"], true);
  }
  const auto b = run({"kl", "--p", "3", "--u1", "1", "--u2", "4", "--mode", "both"});
  ASSERT_EQ(b.code, 0);
  for (const auto& l : lines(b.out)) EXPECT_EQ(nlohmann::json::parse(l)["overlap"], true);
}

TEST(Cli, KlClosedPositive) {
  const auto r = run({"kl", "--p", "2", "--u1", "0", "--u2", "1", "--mode", "closed"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u);
  const auto j = nlohmann::json::parse(ls[0]);
  EXPECT_GT(j["value_lo"].get<double>(), 0.0);
  EXPECT_FALSE(j.contains("overlap"));
}

TEST(Cli, TableRows) {
  const auto r = run({"table", "--p", "2", "--u", "0", "--max-order-exponent", "3", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 8u);
  EXPECT_EQ(ls[0], report::csv_line(report::table_header()));
  const std::vector<std::string> orders = {"1", "2", "4", "4", "8", "8", "8"};
  double lo = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto row = report::table_row_from_csv(ls[i]);
    EXPECT_EQ(row.order, orders[i - 1]);
    EXPECT_EQ(report::to_csv(row), ls[i]);
    lo += row.measure_lo;
  }
  EXPECT_LT(lo, 1.0);
}

TEST(Cli, TableTrivialRowIsNormalizingConstant) {
  const auto r = run({"table", "--p", "2", "--u", "0", "--max-order-exponent", "0"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  const auto row = nlohmann::json::parse(ls[0]);
  const auto f = clentropy::normalizing_constant(clentropy::CLParams(2, 0), 64);
  EXPECT_EQ(row["partition"], "()");
  EXPECT_EQ(row["measure_lo"].get<double>(), f.lo());
  EXPECT_EQ(row["measure_hi"].get<double>(), f.hi());
  EXPECT_EQ(nlohmann::json::parse(ls[1])["summary"], true);
}

TEST(Cli, TableMassPlusTailBracketsOne) {
  const auto r = run({"table", "--p", "3", "--u", "1", "--max-order-exponent", "8"});
  ASSERT_EQ(r.code, 0);
  const auto s = nlohmann::json::parse(lines(r.out).back());
  EXPECT_LE(s["mass_lo"].get<double>(), 1.0);
  EXPECT_GE(s["mass_hi"].get<double>() + s["tail_bound"].get<double>(), 1.0);
}

TEST(Cli, ZetaRecords) {
  const auto r = run({"zeta", "--p", "2", "--k", "3", "--s", "0", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 4u);
  const auto product = report::record_from_csv(ls[1]);
  EXPECT_LE(product.value_lo, 64.0 / 21);
  EXPECT_GE(product.value_hi, 64.0 / 21);
}

TEST(Cli, VerifySuites) {
  const auto ex = run({"verify", "--suite", "exceptions"});
  ASSERT_EQ(ex.code, 0) << ex.out;
  const auto j = nlohmann::json::parse(ex.out);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_TRUE(j["counterexamples"].empty());
  EXPECT_EQ(j["details"]["found"], 4);
  EXPECT_EQ(j["details"]["cases"], "p=2 u=0 (1) | p=2 u=0 (2) | p=2 u=1 (1) | p=3 u=0 (1)");
  const auto m = run({"verify", "--suite", "margins"});
  ASSERT_EQ(m.code, 0);
  const auto mj = nlohmann::json::parse(m.out);
  EXPECT_GE(std::stod(mj["details"]["z2_z4_u0_lo"].dump()), 0.44);
  EXPECT_GE(std::stod(mj["details"]["z2_u1_lo"].dump()), 0.21);
  EXPECT_GE(std::stod(mj["details"]["z3_u0_lo"].dump()), 0.34);
}

TEST(Cli, VerifyBoundedRuns) {
  EXPECT_EQ(run({"verify", "--suite", "lemma1", "--n-max", "4"}).code, 0);
  EXPECT_EQ(run({"verify", "--suite", "exceptions", "--p-max", "2", "--n-max", "1", "--u-max", "0"}).code, 0);
}

TEST(Cli, Deterministic) {
  const std::vector<std::string> args = {"--format", "csv", "entropy", "--p", "3", "--u", "0", "1", "--eps", "1e-7"};
  auto with_threads = [&](const char* t) {
    auto a = args;
    a.insert(a.begin(), {"--threads", t});
    return run(a).out;
  };
  const auto one = with_threads("1");
  EXPECT_EQ(one, with_threads("1"));
  EXPECT_EQ(one, with_threads("4"));
  EXPECT_EQ(run({"table", "--p", "5", "--max-order-exponent", "6"}).out,
            run({"table", "--p", "5", "--max-order-exponent", "6"}).out);
}

TEST(Cli, RefusalEmitsOnlyRefusedRecord) {
  // eps = 1e-12 at p = 2, u = -0.99 cannot close the tail within the depth cap.
  const auto r = run({"entropy", "--p", "2", "--u", "-0.99", "--eps", "1e-12"});
  ASSERT_EQ(r.code, 3) << r.out;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u);
  const auto j = nlohmann::json::parse(ls[0]);
  EXPECT_EQ(j["status"], "refused");
  EXPECT_FALSE(j["diagnostic"].get<std::string>().empty());
}

TEST(Report, CsvRoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-1e3, 1e3);
  const std::string alphabet = "ab,\"=x 1.;";
  auto word = [&] {
    std::string s;
    for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    report::TableRow row{"(" + std::to_string(rng() % 9) + ",1)", std::to_string(rng()), std::to_string(rng()), val(rng),
                         val(rng)};
    ASSERT_EQ(report::table_row_from_csv(report::to_csv(row)), row);
    report::OutputRecord rec;
    rec.command = "kl";
    rec.params = {{"p", "3"}, {"u1", report::format_double(val(rng))}};
    rec.value_lo = val(rng);
    rec.value_hi = std::nextafter(rec.value_lo, INFINITY);
    rec.truncation_level = static_cast<int>(rng() % 100);
    rec.tail_bound = std::ldexp(1.0, -static_cast<int>(rng() % 1000));
    rec.status = report::Status::refused;
    std::string diag = word();
    rec.diagnostic = diag;
    ASSERT_EQ(report::record_from_csv(report::to_csv(rec)), rec) << report::to_csv(rec);
  }
}

TEST(Report, JsonIsValidAndRoundTripsFloats) {
  report::OutputRecord rec;
  rec.command = "entropy";
  rec.params = {{"p", "2"}, {"label", "a\"b"}};
  rec.value_lo = 0.1;
  rec.value_hi = 1.0 / 3;
  rec.tail_bound = INFINITY;
  const auto j = nlohmann::json::parse(report::to_json(rec));
  EXPECT_EQ(j["value_lo"].get<double>(), 0.1);
  EXPECT_EQ(j["value_hi"].get<double>(), 1.0 / 3);
  EXPECT_EQ(j["params"]["label"], "a\"b");
  EXPECT_EQ(j["params"]["p"], 2);
  EXPECT_EQ(j["tail_bound"], "inf");
}

#ifdef CL_ENTROPY_EXE
TEST(Cli, ExecutableExitCodes) {
  const std::string exe = CL_ENTROPY_EXE;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(exe + " entropy --p 4 --u 0"), 2);
  EXPECT_EQ(status(exe + " zeta --p 3 --k 2 --s 1"), 0);
  EXPECT_EQ(status(exe + " --help"), 0);
}
#endif
