// Acceptance gate: runs every verification suite at the shipped sizes and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.
//
// Criterion 15 (byte-identical output across repeated runs and worker
// counts) is exercised on the scaled configuration: it runs the full
// driver three times, which at shipped sizes would triple a multi-minute
// budget without touching different code paths.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cpoly/verify.hpp"

using cpoly::verify::run_verify;
using cpoly::verify::VerifyOutcome;
using cpoly::verify::VerifySpec;

namespace {

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> detail;
};

// all checks of the named suite whose name contains `needle`
std::vector<const cpoly::stats::CheckRecord*> find_checks(const VerifyOutcome& o,
                                                          const std::string& suite,
                                                          const std::string& needle) {
  std::vector<const cpoly::stats::CheckRecord*> out;
  for (const auto& rep : o.reports) {
    if (rep.suite != suite) continue;
    for (const auto& c : rep.checks)
      if (c.name.find(needle) != std::string::npos) out.push_back(&c);
  }
  return out;
}

void require(Criterion& cr, const VerifyOutcome& o, const std::string& suite,
             const std::string& needle) {
  const auto found = find_checks(o, suite, needle);
  if (found.empty()) {
    cr.pass = false;
    cr.detail.push_back("missing check: " + suite + "/" + needle);
    return;
  }
  for (const auto* c : found) {
    if (!c->pass) cr.pass = false;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: observed %.6g target %.6g %s", c->name.c_str(),
                  c->observed, c->target, c->pass ? "ok" : "FAIL");
    cr.detail.push_back(buf);
  }
}

void require_suite(Criterion& cr, const VerifyOutcome& o, const std::string& suite) {
  bool seen = false;
  for (const auto& rep : o.reports) {
    if (rep.suite != suite) continue;
    seen = true;
    for (const auto& c : rep.checks) {
      if (c.mandatory && !c.pass) cr.pass = false;
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: observed %.6g target %.6g %s%s", c.name.c_str(),
                    c.observed, c.target, c.pass ? "ok" : "FAIL",
                    c.mandatory ? "" : " (advisory)");
      cr.detail.push_back(buf);
    }
  }
  if (!seen) {
    cr.pass = false;
    cr.detail.push_back("missing suite: " + suite);
  }
}

}  // namespace

int main(int argc, char** argv) {
  VerifySpec spec;
  if (argc > 1) {
    std::ifstream in(argv[1]);
    if (!in) {
      std::fprintf(stderr, "cannot open %s\n", argv[1]);
      return 2;
    }
    nlohmann::json j;
    in >> j;
    spec = VerifySpec::from_json(j);
  }

  std::printf("running verification suites (shipped sizes)...\n");
  std::fflush(stdout);
  const VerifyOutcome full = run_verify(spec, {"all"});

  std::vector<Criterion> cs;
  {
    Criterion c{1, "exact identity suite: E[(sum w)^2 - sum w^2]^2 = 2n(n-1)"};
    require(c, full, "exact", "pair-sum second moment");
    cs.push_back(c);
  }
  {
    Criterion c{2, "exact moment suite: E H = 0, E H^2 = E Q, truncated odd moments >= 0"};
    require(c, full, "exact", "E H = 0");
    require(c, full, "exact", "E Ht = 0");
    cs.push_back(c);
  }
  {
    Criterion c{3, "moment comparison inequalities with fitted constant"};
    require(c, full, "exact", "moment comparison");
    require(c, full, "exact", "fitted moment constant");
    cs.push_back(c);
  }
  {
    Criterion c{4, "maximal inequality, exact evaluation"};
    require(c, full, "exact", "maximal inequality");
    cs.push_back(c);
  }
  {
    Criterion c{5, "Green's constants: gamma dual route and convolution identity"};
    require(c, full, "constants", "gamma(simple, d=3) quadrature");
    require(c, full, "constants", "gamma quadrature vs series, simple");
    require(c, full, "constants", "convolution identity residual");
    cs.push_back(c);
  }
  {
    Criterion c{6, "d>=3 mean law: E Q_n/n near gamma"};
    require(c, full, "clt_d3", "mean Q/n vs gamma");
    cs.push_back(c);
  }
  {
    Criterion c{7, "d=3 energy CLT: KS <= 0.05 and decreasing in n"};
    require(c, full, "clt_d3", "KS of H/sqrt(gamma n)");
    require(c, full, "clt_d3", "KS decreasing");
    cs.push_back(c);
  }
  {
    Criterion c{8, "d=2 energy CLT: variance plateau and normality"};
    require_suite(c, full, "clt_d2");
    cs.push_back(c);
  }
  {
    Criterion c{9, "d=1 energy scaling, kurtosis, self-consistency"};
    require_suite(c, full, "clt_d1");
    cs.push_back(c);
  }
  {
    Criterion c{10, "d=3 SILT: studentized CLT and variance slope"};
    require(c, full, "clt_d3", "KS of studentized Q");
    require(c, full, "variance_d3", "Var(Q) slope");
    cs.push_back(c);
  }
  {
    Criterion c{11, "d=4 SILT variance slope vs lambda2^2"};
    require(c, full, "variance_d4", "Var(Q) slope");
    cs.push_back(c);
  }
  {
    Criterion c{12, "moment-growth boundedness: Q, range, pair intersections"};
    require_suite(c, full, "moments_d3");
    cs.push_back(c);
  }
  {
    Criterion c{13, "per-path identities on random paths"};
    require(c, full, "exact", "per-path identities");
    cs.push_back(c);
  }
  {
    Criterion c{14, "LIL smoke: normalized running maxima in range"};
    require_suite(c, full, "lil_d1");
    require_suite(c, full, "lil_d3");
    cs.push_back(c);
  }
  {
    Criterion c{15, "determinism: byte-identical output across runs and workers"};
    VerifySpec small;
    {
      std::ifstream in(std::string(CPOLY_SOURCE_DIR) + "/configs/verify_small.json");
      nlohmann::json j;
      in >> j;
      small = VerifySpec::from_json(j);
    }
    small.workers = 8;
    const VerifyOutcome a = run_verify(small, {"all"});
    const VerifyOutcome b = run_verify(small, {"all"});
    small.workers = 1;
    const VerifyOutcome w1 = run_verify(small, {"all"});
    const std::string ja = a.to_json().dump(), jb = b.to_json().dump(),
                      jw = w1.to_json().dump();
    if (ja != jb || a.text() != b.text()) {
      c.pass = false;
      c.detail.push_back("repeated runs differ");
    }
    if (ja != jw || a.text() != w1.text()) {
      c.pass = false;
      c.detail.push_back("worker counts 8 vs 1 differ");
    }
    if (c.pass) c.detail.push_back("3 runs (workers 8, 8, 1) byte-identical");
    cs.push_back(c);
  }

  int passed = 0;
  for (const auto& c : cs) {
    std::printf("[%s] criterion %2d: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str());
    for (const auto& d : c.detail) std::printf("          %s\n", d.c_str());
    if (c.pass) ++passed;
  }
  std::printf("acceptance: %d/15 criteria passed\n", passed);
  return passed == 15 ? 0 : 1;
}
