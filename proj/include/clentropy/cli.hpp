#pragma once

// cl-entropy command-line front end.
//
//   cl-entropy [--format json|csv] [--threads N] <entropy|kl|table|zeta|verify> ...
//
// Exit codes: 0 ok, 2 usage error, 3 certified-computation refusal,
// 4 verification failure. Records are buffered per command and written only
// when the command completes, so a refusal never leaves partial output.

#include <algorithm>
#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "clentropy/entropy.hpp"
#include "clentropy/measures.hpp"
#include "clentropy/report.hpp"
#include "clentropy/verify.hpp"
#include "clentropy/zeta.hpp"

namespace clentropy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRefused = 3;
inline constexpr int kExitVerifyFailed = 4;
inline constexpr unsigned kMaxPrime = 97;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Refusal tagged with the parameters of the computation that refused.
class CommandRefusal : public Refusal {
 public:
  CommandRefusal(const std::string& what, report::Fields params) : Refusal(what), params_(std::move(params)) {}
  const report::Fields& params() const { return params_; }

 private:
  report::Fields params_;
};

template <class F>
auto tag_refusal(const report::Fields& params, F&& compute) {
  try {
    return compute();
  } catch (const CommandRefusal&) {
    throw;
  } catch (const Refusal& e) {
    throw CommandRefusal(e.what(), params);
  }
}

inline void check_prime(unsigned p) {
  if (!is_prime(p)) throw UsageError(std::to_string(p) + " is not prime");
  if (p > kMaxPrime) throw UsageError("primes above " + std::to_string(kMaxPrime) + " are not supported");
}

inline void check_unit_rank(double u, const char* name) {
  if (!(u > -1.0) || !std::isfinite(u)) throw UsageError(std::string(name) + " must be a real number > -1");
}

/// Shortest decimal that reads back to the same double, for parameter echoes.
inline std::string param(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Buffered command output.
class Output {
 public:
  explicit Output(report::Format f) : format_(f) {}

  void add(const report::OutputRecord& r) {
    header(report::record_header());
    lines_.push_back(format_ == report::Format::json ? report::to_json(r) : report::to_csv(r));
  }
  void add(const report::TableRow& r) {
    header(report::table_header());
    lines_.push_back(format_ == report::Format::json ? report::to_json(r) : report::to_csv(r));
  }
  void add(const report::SuiteReport& r) {
    header(report::suite_header());
    lines_.push_back(format_ == report::Format::json ? report::to_json(r) : report::to_csv(r));
  }
  /// JSON-only trailing line (CSV keeps one fixed header per stream).
  void add_json_only(const std::string& line) {
    if (format_ == report::Format::json) lines_.push_back(line);
  }

  void flush(std::ostream& os) const {
    for (const auto& l : lines_) os << l << '\n';
  }

 private:
  void header(const std::vector<std::string>& h) {
    if (format_ == report::Format::csv && lines_.empty()) lines_.push_back(report::csv_line(h));
  }
  report::Format format_;
  std::vector<std::string> lines_;
};

inline report::OutputRecord make_record(const std::string& command, report::Fields params, const CertifiedValue& v) {
  report::OutputRecord r;
  r.command = command;
  r.params = std::move(params);
  r.value_lo = v.value.lo();
  r.value_hi = v.value.hi();
  r.truncation_level = v.truncation_level;
  r.tail_bound = v.tail_bound;
  return r;
}

inline report::OutputRecord refused_record(const std::string& command, report::Fields params, const std::string& why) {
  report::OutputRecord r;
  r.command = command;
  r.params = std::move(params);
  r.status = report::Status::refused;
  r.diagnostic = why;
  return r;
}

struct GlobalOptions {
  std::string format = "json";
  unsigned threads = 0;
  long seed = 0;  // reserved, unused
  report::Format parsed_format() const { return format == "csv" ? report::Format::csv : report::Format::json; }
  unsigned worker_count() const {
    return threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  }
};

struct EntropyOptions {
  std::vector<unsigned> p{2};
  std::vector<double> u{0.0};
  double eps = 1e-6;
};

inline int run_entropy(const EntropyOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (!(o.eps >= 1e-12 && o.eps <= 1e-1)) throw UsageError("--eps must lie in [1e-12, 1e-1]");
  for (unsigned p : o.p) check_prime(p);
  for (double u : o.u) check_unit_rank(u, "--u");
  Output buf(g.parsed_format());
  for (unsigned p : o.p)
    for (double u : o.u) {
      const report::Fields params = {{"p", std::to_string(p)}, {"u", param(u)}, {"eps", param(o.eps)}};
      const auto r = tag_refusal(params, [&] { return entropy(CLParams(p, u), o.eps, g.worker_count()); });
      auto rec = make_record("entropy", params, r.H);
      rec.extra = {{"minus_log_F_lo", report::format_double(r.minus_log_Fu.lo())},
                   {"minus_log_F_hi", report::format_double(r.minus_log_Fu.hi())}};
      buf.add(rec);
    }
  buf.flush(out);
  return kExitOk;
}

struct KlOptions {
  unsigned p = 2;
  double u1 = 0.0;
  double u2 = 0.0;
  std::string mode = "both";
  double tol = 1e-8;
};

inline int run_kl(const KlOptions& o, const GlobalOptions& g, std::ostream& out) {
  check_prime(o.p);
  check_unit_rank(o.u1, "--u1");
  check_unit_rank(o.u2, "--u2");
  if (!(o.tol >= 1e-12 && o.tol <= 1e-1)) throw UsageError("--tol must lie in [1e-12, 1e-1]");
  const report::Fields params = {{"p", std::to_string(o.p)}, {"u1", param(o.u1)}, {"u2", param(o.u2)}};
  Output buf(g.parsed_format());
  std::optional<CertifiedValue> closed, direct;
  if (o.mode == "closed" || o.mode == "both")
    closed = tag_refusal(params, [&] { return kl_closed(o.p, o.u1, o.u2, o.tol); });
  if (o.mode == "direct" || o.mode == "both")
    direct = tag_refusal(params, [&] { return kl_direct(o.p, o.u1, o.u2, o.tol); });
  const std::string overlap = closed && direct ? (closed->value.overlaps(direct->value) ? "true" : "false") : "";
  for (auto [route, value] : {std::pair{"closed", closed}, std::pair{"direct", direct}}) {
    if (!value) continue;
    auto rec = make_record("kl", params, *value);
    rec.extra = {{"route", route}};
    if (!overlap.empty()) rec.extra.emplace_back("overlap", overlap);
    buf.add(rec);
  }
  buf.flush(out);
  return kExitOk;
}

struct TableOptions {
  unsigned p = 2;
  double u = 0.0;
  int max_order_exponent = 3;
};

inline int run_table(const TableOptions& o, const GlobalOptions& g, std::ostream& out) {
  check_prime(o.p);
  check_unit_rank(o.u, "--u");
  if (o.max_order_exponent < 0 || o.max_order_exponent > 20)
    throw UsageError("--max-order-exponent must lie in [0, 20]");
  const CLParams cl(o.p, o.u);
  const int J = 64;
  Output buf(g.parsed_format());
  Interval total(0.0);
  for (int n = 0; n <= o.max_order_exponent; ++n)
    for (const auto& grp : groups_of_order(o.p, n)) {
      const Interval m = cl_measure(cl, grp, J);
      total += m;
      buf.add(report::TableRow{grp.type().to_string(), group_order(grp).get_str(), aut_order(grp).get_str(), m.lo(),
                               m.hi()});
    }
  double tail = std::numeric_limits<double>::infinity();
  try {
    tail = tail_upper_bound(o.p, o.max_order_exponent, mass_majorant(cl, normalizing_constant(cl, J)));
  } catch (const Refusal&) {
  }
  buf.add_json_only("{\"command\":\"table\",\"summary\":true,\"mass_lo\":" + report::format_double(total.lo()) +
                    ",\"mass_hi\":" + report::format_double(total.hi()) +
                    ",\"tail_bound\":" + report::detail::json_number(tail) + "}");
  buf.flush(out);
  return kExitOk;
}

struct ZetaOptions {
  unsigned p = 2;
  int k = 1;
  double s = 0.0;
  int N = 30;
};

inline int run_zeta(const ZetaOptions& o, const GlobalOptions& g, std::ostream& out) {
  check_prime(o.p);
  if (o.k < 1) throw UsageError("--k must be >= 1");
  if (!(o.s > -1.0)) throw UsageError("--s must be > -1");
  if (o.N < 0 || o.N > 40) throw UsageError("--N must lie in [0, 40]");
  const ZetaParams z(o.p, o.k, o.s);
  const report::Fields params = {{"p", std::to_string(o.p)}, {"k", std::to_string(o.k)}, {"s", param(o.s)}};
  const Interval product = zeta_product(z);
  const CertifiedValue sum = tag_refusal(params, [&] { return zeta_sum(z, o.N); });
  const Interval derivative = zeta_log_derivative(z);
  const std::string overlap = sum.value.overlaps(product) ? "true" : "false";
  Output buf(g.parsed_format());
  auto rec = make_record("zeta", params, {product, 0, 0.0});
  rec.extra = {{"route", "product"}, {"overlap", overlap}};
  buf.add(rec);
  rec = make_record("zeta", params, sum);
  rec.extra = {{"route", "sum"}, {"overlap", overlap}};
  buf.add(rec);
  rec = make_record("zeta", params, {derivative, 0, 0.0});
  rec.extra = {{"route", "derivative"}};
  buf.add(rec);
  buf.flush(out);
  return kExitOk;
}

struct VerifyOptions {
  std::string suite = "all";
  verify::Bounds bounds;
};

inline int run_verify(const VerifyOptions& o, const GlobalOptions& g, std::ostream& out) {
  std::vector<std::string> suites;
  if (o.suite == "all") {
    suites = verify::suite_names();
  } else {
    const auto& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), o.suite) == names.end())
      throw UsageError("unknown suite '" + o.suite + "'");
    suites = {o.suite};
  }
  verify::Bounds b = o.bounds;
  b.threads = g.worker_count();
  Output buf(g.parsed_format());
  bool all_passed = true;
  for (const auto& s : suites) {
    const auto r = verify::run_suite(s, b);
    all_passed = all_passed && r.passed;
    buf.add(r);
  }
  buf.flush(out);
  return all_passed ? kExitOk : kExitVerifyFailed;
}

/// Parses argv, runs the selected subcommand and returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified entropy, zeta and relative-entropy computations for Cohen-Lenstra measures", "cl-entropy"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads, "Worker threads (default: available parallelism)");
  app.add_option("--seed", g.seed, "Reserved; no randomness is used");

  EntropyOptions eo;
  auto* ent = app.add_subcommand("entropy", "Certified Shannon entropy H(nu^u_CL)");
  ent->add_option("--p", eo.p, "Prime(s)");
  ent->add_option("--u", eo.u, "Unit-rank(s), real > -1");
  ent->add_option("--eps", eo.eps, "Target enclosure width");

  KlOptions ko;
  auto* kl = app.add_subcommand("kl", "Relative entropy D_KL(nu^u1 || nu^u2)");
  kl->add_option("--p", ko.p, "Prime");
  kl->add_option("--u1", ko.u1, "First unit-rank");
  kl->add_option("--u2", ko.u2, "Second unit-rank");
  kl->add_option("--mode", ko.mode, "closed, direct or both")->check(CLI::IsMember({"closed", "direct", "both"}));
  kl->add_option("--tol", ko.tol, "Target enclosure width");

  TableOptions to;
  auto* tab = app.add_subcommand("table", "Per-class measures up to a maximal order");
  tab->add_option("--p", to.p, "Prime");
  tab->add_option("--u", to.u, "Unit-rank");
  tab->add_option("--max-order-exponent", to.max_order_exponent, "Largest n with #A = p^n");

  ZetaOptions zo;
  auto* zet = app.add_subcommand("zeta", "Cohen-Lenstra zeta function: product, sum and derivative");
  zet->add_option("--p", zo.p, "Prime");
  zet->add_option("--k", zo.k, "Level k >= 1");
  zet->add_option("--s", zo.s, "Real evaluation point > -1");
  zet->add_option("--N", zo.N, "Truncation level of the group sum");

  VerifyOptions vo;
  auto* ver = app.add_subcommand("verify", "Re-check the numerical claims");
  ver->add_option("--suite", vo.suite, "lemma1|exceptions|monotone|hall|zeta|margins|all");
  ver->add_option("--p-max", vo.bounds.p_max, "Largest prime scanned");
  ver->add_option("--n-max", vo.bounds.n_max, "Largest order exponent (or Hall/zeta depth)");
  ver->add_option("--u-max", vo.bounds.u_max, "Largest unit-rank scanned");

  for (auto* sub : {ent, kl, tab, zet, ver}) sub->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "entropy") return run_entropy(eo, g, out);
    if (name == "kl") return run_kl(ko, g, out);
    if (name == "table") return run_table(to, g, out);
    if (name == "zeta") return run_zeta(zo, g, out);
    return run_verify(vo, g, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Refusal& e) {
    const auto* tagged = dynamic_cast<const CommandRefusal*>(&e);
    Output buf(g.parsed_format());
    buf.add(refused_record(name, tagged ? tagged->params() : report::Fields{}, e.what()));
    buf.flush(out);
    err << "refused: " << e.what() << '\n';
    return kExitRefused;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace clentropy::cli
