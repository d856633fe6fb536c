// isozonoid command-line driver.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isozonoid/io.hpp"
#include "isozonoid/isozonoid.hpp"

namespace {

using namespace isozonoid;
using nlohmann::json;
namespace st = isozonoid::stability;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Infinity") return kInf;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && p >= 1.0, ErrorCode::InvalidArgument, "p must be a number >= 1 or 'inf'");
  return p;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ISOZONOID_SEED")) {
    try {
      return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "ISOZONOID_SEED is not an unsigned integer");
    }
  }
  return kDefaultSeed;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text(out, text);
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(io::to_json(Vec(m.row(r).transpose())));
  return rows;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyConfig {
  std::string suite;
  int n = 2;
  std::string p = "";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string csv;
  int jobs = 1;
  int count = 0;
  bool timing = false;
};

std::vector<st::StabilityReport> run_suite(const VerifyConfig& c) {
  const std::uint64_t seed = resolve_seed(c.seed);
  const int n = c.n;
  require(n >= 2, ErrorCode::InvalidArgument, "--n must be at least 2");
  std::vector<st::StabilityReport> rows;
  auto append = [&rows](std::vector<st::StabilityReport> r) { rows.insert(rows.end(), r.begin(), r.end()); };

  if (c.suite == "theoremB") {
    require(n <= 3, ErrorCode::DimensionUnsupported, "theoremB suite supports n in {2, 3}");
    const double p = parse_p(c.p.empty() ? "1" : c.p);
    const int count = c.count > 0 ? c.count : 200;
    std::vector<double> ks;
    for (int i = 0; i < count; ++i) ks.push_back(n + 1 + i % 4);
    auto family = st::perturbation_family(st::FamilyKind::RandomIsotropic, n, ks, seed);
    family.insert(family.begin(), cross_measure(n));
    st::TheoremBOptions o;
    o.jobs = c.jobs;
    append(st::theorem_b_suite(n, p, family, o));
  } else if (c.suite == "s1") {
    std::vector<AtomicMeasure> family = {equiangular_measure(3), equiangular_measure(4), cross_measure(2)};
    std::vector<std::string> labels = {"hexagonal", "octagonal", "cross"};
    for (auto& [label, mu] : st::s1_sweep_family()) {
      family.push_back(mu);
      labels.push_back(label);
    }
    append(st::s1_sharp_suite(family, labels, c.jobs));
    append(st::s1_lemma_checks());
  } else if (c.suite == "zpstab") {
    const double p = parse_p(c.p.empty() ? "inf" : c.p);
    require(n <= 3, ErrorCode::DimensionUnsupported, "zpstab suite supports n in {2, 3}");
    std::vector<double> alphas;
    for (int i = 0; i <= 8; ++i) alphas.push_back(0.05 * i);
    st::TrendOptions o;
    o.jobs = c.jobs;
    o.monotone = true;
    auto tilted = st::zpmustab_consistency(n, p, st::perturbation_family(st::FamilyKind::TiltedPair, n, alphas), o);
    for (std::size_t i = 0; i < tilted.size(); ++i) tilted[i].label = "tilted alpha=" + st::detail::fmt(alphas[i]);
    append(tilted);
    if (n == 2) {
      o.monotone = false;
      const std::vector<double> ms = {2, 3, 4, 6};
      auto eq = st::zpmustab_consistency(n, p, st::perturbation_family(st::FamilyKind::Equiangular, 2, ms), o);
      for (std::size_t i = 0; i < eq.size(); ++i) eq[i].label = "equiangular m=" + st::detail::fmt(ms[i]);
      append(eq);
    }
  } else if (c.suite == "reviso") {
    std::vector<BodyRep> bodies;
    std::vector<std::string> labels;
    if (n == 2) {
      bodies = {cube(2), st::regular_hexagon(), st::cut_corner_square(0.1), st::cut_corner_square(0.3)};
      labels = {"W^2", "hexagon", "cut corner 0.1", "cut corner 0.3"};
    } else {
      require(n == 3, ErrorCode::DimensionUnsupported, "reviso suite supports n in {2, 3}");
      bodies = {cube(3)};
      labels = {"W^3"};
      for (double h : {0.05, 0.1, 0.2, 0.3}) {
        bodies.push_back(st::truncated_cube(h));
        labels.push_back("truncated cube h=" + st::detail::fmt(h));
      }
    }
    st::RevisoOptions o;
    o.seed = seed;
    o.jobs = c.jobs;
    append(st::reverse_isoperimetric_suite(bodies, labels, o));
  } else if (c.suite == "planar") {
    std::vector<double> ts;
    for (int i = 0; i <= 10; ++i) ts.push_back(0.05 * i);
    append(parallel_map<st::StabilityReport>(ts.size(), c.jobs, [&](std::size_t i) {
      st::detail::Stopwatch sw;
      const auto chain = st::planar_chain(st::octagon_body(ts[i], ts[i]), true, seed);
      return st::planar_report("octagon t=" + st::detail::fmt(ts[i]), chain, sw.ms(), "square inscribed by construction");
    }));
    const std::vector<double> cuts = {0.05, 0.1, 0.2, 0.3};
    append(parallel_map<st::StabilityReport>(cuts.size(), c.jobs, [&](std::size_t i) {
      return st::planar_suite(st::cut_corner_square(cuts[i]), "cut corner " + st::detail::fmt(cuts[i]), seed);
    }));
  } else if (c.suite == "transport") {
    std::vector<double> ps = {1, 1.2, 1.5, 1.9, 2.1, 2.3, 2.7, 3, 5, 10, kInf};
    if (!c.p.empty()) ps = {parse_p(c.p)};
    append(st::transport_suite(ps, c.count > 0 ? c.count : 256, c.jobs));
  } else if (c.suite == "ballbarthe") {
    append(st::ballbarthe_suite(c.count > 0 ? c.count : 1000, seed, c.jobs));
  } else if (c.suite == "caps") {
    append(st::caps_suite(c.count > 0 ? c.count : 200, seed, c.jobs));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + c.suite + "'");
  }
  return rows;
}

int cmd_verify(const VerifyConfig& c) {
  const auto rows = run_suite(c);
  const std::string text = io::to_json(rows, c.timing).dump(2) + "\n";
  const std::string csv = io::to_csv(rows, c.timing);
  emit(c.out, text);
  std::string csv_path = c.csv;
  if (csv_path.empty() && !c.out.empty() && c.out != "-") {
    csv_path = c.out;
    const auto dot = csv_path.rfind(".json");
    if (dot != std::string::npos && dot + 5 == csv_path.size()) csv_path.erase(dot);
    csv_path += ".csv";
  }
  if (!csv_path.empty()) write_text(csv_path, csv);
  else std::cerr << csv;
  return st::all_pass(rows) ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// volume

struct VolumeConfig {
  std::string body, measure, which = "Z", p = "inf", out;
};

int cmd_volume(const VolumeConfig& c) {
  require(c.body.empty() != c.measure.empty(), ErrorCode::InvalidArgument, "give exactly one of --body, --measure");
  VolumeResult v;
  if (!c.body.empty()) {
    v = volume(io::body_from_json(io::read_file(c.body)));
  } else {
    const auto mu = io::measure_from_json(io::read_file(c.measure));
    const double p = parse_p(c.p);
    require(c.which == "Z" || c.which == "Zstar", ErrorCode::InvalidArgument, "--which must be Z or Zstar");
    v = volume(c.which == "Z" ? body_Zp(mu, p) : body_Zp_star(mu, p));
  }
  emit(c.out, io::to_json(v).dump() + "\n");
  return kExitPass;
}

// ---------------------------------------------------------------------------
// distance

struct DistanceConfig {
  std::string kind, measure, measure2, body, body2, out;
  std::optional<std::uint64_t> seed;
  int starts = 16;
};

int cmd_distance(const DistanceConfig& c) {
  const std::uint64_t seed = resolve_seed(c.seed);
  json r;
  auto measure = [](const std::string& path) {
    require(!path.empty(), ErrorCode::InvalidArgument, "this distance needs --measure");
    return io::measure_from_json(io::read_file(path));
  };
  auto orbit_json = [](const OrbitResult& o) {
    return json{{"rotation", mat_json(o.rotation)}, {"resolution", o.resolution}, {"evaluations", o.evaluations}};
  };
  if (c.kind == "wass") {
    const auto mu = measure(c.measure), nu = measure(c.measure2);
    const auto plan = wasserstein(mu, nu);
    json flows = json::array();
    for (const auto& f : plan.flows) flows.push_back({{"source", f.source}, {"target", f.target}, {"amount", f.amount}});
    r = {{"value", plan.cost}, {"certificate", {{"plan", flows}}}};
  } else if (c.kind == "wassO") {
    const auto o = wasserstein_to_cross(measure(c.measure));
    r = {{"value", o.value}, {"certificate", orbit_json(o)}};
  } else if (c.kind == "haus") {
    const auto h = hausdorff_spherical(measure(c.measure).directions(), measure(c.measure2).directions());
    r = {{"value", h.value}, {"certificate", {{"min_form", h.min_form}}}};
  } else if (c.kind == "hausO") {
    const auto h = hausdorff_to_cross(measure(c.measure).directions());
    auto cert = orbit_json(h.orbit);
    cert["min_form"] = h.min_form;
    r = {{"value", h.orbit.value}, {"certificate", cert}};
  } else if (c.kind == "bm" || c.kind == "vol") {
    require(!c.body.empty(), ErrorCode::InvalidArgument, "this distance needs --body");
    const auto k = io::body_from_json(io::read_file(c.body));
    const auto m = c.body2.empty() ? cube(k.dim()) : io::body_from_json(io::read_file(c.body2));
    const auto d = c.kind == "bm" ? banach_mazur(k, m, c.starts, seed) : volume_distance(k, m, c.starts, seed);
    r = {{"value", d.value},
         {"certificate",
          {{"map", mat_json(d.map)},
           {"restarts", d.restarts},
           {"evaluations", d.evaluations},
           {"exact_containment", d.exact_containment},
           {"abs_error", d.abs_error}}}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown distance kind '" + c.kind + "'");
  }
  emit(c.out, r.dump(2) + "\n");
  return kExitPass;
}

// ---------------------------------------------------------------------------
// john

int cmd_john(const std::string& body, const std::string& out) {
  const auto k = io::body_from_json(io::read_file(body));
  const auto j = john_ellipsoid(k);
  const auto normalized = k.linear_image(j.normalization);
  json r = {{"ellipsoid", mat_json(j.ellipsoid.A)},
            {"ellipsoid_volume", j.ellipsoid.volume()},
            {"normalization", mat_json(j.normalization)},
            {"contact_residual", j.residual},
            {"contact_measure", io::to_json(contact_measure(normalized))},
            {"isoperimetric_ratio", isoperimetric_ratio(k)},
            {"isoperimetric_ratio_normalized", isoperimetric_ratio(normalized)}};
  emit(out, r.dump(2) + "\n");
  return kExitPass;
}

// ---------------------------------------------------------------------------
// transport

int cmd_transport(const std::string& p_text, int grid, const std::string& check, const std::string& out) {
  const double p = parse_p(p_text);
  require(grid >= 1, ErrorCode::InvalidArgument, "--grid must be positive");
  transport::BoundReport rep;
  if (check == "box") rep = transport::verify_derivative_box(p, grid);
  else if (check == "second") rep = transport::verify_second_derivative_bounds(p, grid);
  else if (check == "mass") rep = transport::verify_mass_transport(p, grid);
  else throw Error(ErrorCode::InvalidArgument, "--check must be box, second or mass");
  std::ostringstream s;
  s << "quantity,t,value,bound,margin\n" << std::setprecision(17);
  for (const auto& r : rep.rows) s << r.quantity << ',' << r.t << ',' << r.value << ',' << r.bound << ',' << r.margin << '\n';
  emit(out, s.str());
  return rep.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isozonoid: isotropic measures, L_p zonoids and their stability checks"};
  app.require_subcommand(1);

  VerifyConfig vc;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and write StabilityReport rows");
  verify->add_option("--suite", vc.suite, "theoremB | s1 | zpstab | reviso | planar | transport | ballbarthe | caps")
      ->required()
      ->check(CLI::IsMember({"theoremB", "s1", "zpstab", "reviso", "planar", "transport", "ballbarthe", "caps"}));
  verify->add_option("--n", vc.n, "dimension (theoremB, zpstab, reviso)")->capture_default_str();
  verify->add_option("--p", vc.p, "exponent, number >= 1 or 'inf' (default: 1 for theoremB, inf for zpstab, the full list for transport)");
  verify->add_option("--seed", vc.seed, "random seed (default: $ISOZONOID_SEED, else 0x5EED)");
  verify->add_option("--out", vc.out, "JSON report path (default: stdout)");
  verify->add_option("--csv", vc.csv, "CSV summary path (default: next to --out, else stderr)");
  verify->add_option("--jobs", vc.jobs, "worker threads; output order does not depend on it")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--count", vc.count, "number of random instances or grid points (suite default when 0)")->capture_default_str();
  verify->add_flag("--timing", vc.timing, "include runtime_ms (output is then not reproducible byte for byte)");

  VolumeConfig volc;
  auto* vol = app.add_subcommand("volume", "Volume of a polytope, or of Z_p / Z*_p of a measure");
  vol->add_option("--body", volc.body, "body JSON");
  vol->add_option("--measure", volc.measure, "measure JSON");
  vol->add_option("--which", volc.which, "Z or Zstar (with --measure)")->capture_default_str();
  vol->add_option("--p", volc.p, "exponent (with --measure)")->capture_default_str();
  vol->add_option("--out", volc.out, "output path (default: stdout)");

  DistanceConfig dc;
  auto* dist = app.add_subcommand("distance", "Distances between measures or bodies");
  dist->add_option("--kind", dc.kind, "wass | wassO | haus | hausO | bm | vol")
      ->required()
      ->check(CLI::IsMember({"wass", "wassO", "haus", "hausO", "bm", "vol"}));
  dist->add_option("--measure", dc.measure, "measure JSON");
  dist->add_option("--measure2", dc.measure2, "second measure JSON (wass, haus)");
  dist->add_option("--body", dc.body, "body JSON (bm, vol)");
  dist->add_option("--body2", dc.body2, "second body JSON (default: the cube W^n)");
  dist->add_option("--starts", dc.starts, "optimizer restarts (bm, vol)")->capture_default_str()->check(CLI::PositiveNumber);
  dist->add_option("--seed", dc.seed, "random seed (default: $ISOZONOID_SEED, else 0x5EED)");
  dist->add_option("--out", dc.out, "output path (default: stdout)");

  std::string john_body, john_out;
  auto* john = app.add_subcommand("john", "John ellipsoid, contact measure and isoperimetric ratio of a symmetric polytope");
  john->add_option("--body", john_body, "body JSON")->required();
  john->add_option("--out", john_out, "output path (default: stdout)");

  std::string tp = "inf", tcheck, tout;
  int tgrid = 256;
  auto* tr = app.add_subcommand("transport", "Grid checks of the transport maps between rho_p and rho_2");
  tr->add_option("--p", tp, "exponent, number >= 1 or 'inf'")->capture_default_str();
  tr->add_option("--grid", tgrid, "grid points")->capture_default_str();
  tr->add_option("--check", tcheck, "box | second | mass")->required()->check(CLI::IsMember({"box", "second", "mass"}));
  tr->add_option("--out", tout, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(vc);
    if (vol->parsed()) return cmd_volume(volc);
    if (dist->parsed()) return cmd_distance(dc);
    if (john->parsed()) return cmd_john(john_body, john_out);
    if (tr->parsed()) return cmd_transport(tp, tgrid, tcheck, tout);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
