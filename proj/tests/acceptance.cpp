// Acceptance criteria 1-10. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "isozonoid/isozonoid.hpp"

using namespace isozonoid;

namespace {

// Pinned tolerances.
constexpr double kExactRel = 1e-9;
constexpr double kQuadRel = 1e-3;
constexpr double kZ2Identity = 1e-10;
constexpr double kAreaExact = 1e-12;
constexpr double kCauchyBinet = 1e-9;
constexpr double kMassIdentity = 1e-9;
constexpr double kJohnShape = 1e-8;
constexpr double kContact = 1e-8;
constexpr double kAssignment = 1e-12;
constexpr double kPlanarIdentity = 1e-12;

// Pinned runtime limits (seconds); 0 means none.
constexpr double kLimit1 = 60, kLimit3 = 600, kLimit4 = 30, kLimit6 = 10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what() << "; ";
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && s > limit_s) {
    o.pass = false;
    o.detail << "runtime " << s << " s exceeds " << limit_s << " s; ";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-40s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), s, o.detail.str().c_str());
  std::fflush(stdout);
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double lp_ball_volume(int n, double p) {
  if (is_infinite(p)) return std::pow(2.0, n);
  return std::pow(2.0, n) * std::pow(std::tgamma(1.0 + 1.0 / p), n) / std::tgamma(1.0 + n / p);
}

AtomicMeasure random_measure(int n, Rng& rng) {
  std::uniform_int_distribution<int> kd(n, n + 6);
  return stability::random_isotropic_measure(n, kd(rng), rng);
}

double assignment_by_enumeration(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  std::vector<int> perm(nu.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.atoms()[i].c * mu.atoms()[i].u.angle_to(nu.atoms()[perm[i]].u);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

int main() {
  std::printf("isozonoid acceptance, %d worker thread(s)\n", jobs());

  criterion(1, "closed-form polar volumes", kLimit1, [](Outcome& o) {
    double worst = 0.0;
    for (int n : {2, 3})
      for (double p : {1.0, 2.0, 4.0, kInf}) {
        const auto v = volume(body_Zp_star(cross_measure(n), p));
        const double ref = lp_ball_volume(n, p);
        const double rel = std::abs(v.value - ref) / ref;
        const double tol = v.method == VolumeMethod::Exact ? kExactRel : kQuadRel;
        worst = std::max(worst, rel);
        o.check(rel <= tol, "n=" + std::to_string(n) + " p=" + num(p) + " rel=" + num(rel));
      }
    o.check(std::abs(volume(body_Zp_star(cross_measure(3), 2.0)).value - 4 * kPi / 3) <= kQuadRel * 4 * kPi / 3,
            "V(Z*_2(nu_3)) != 4pi/3");
    o.check(std::abs(volume(body_Zp_star(cross_measure(2), kInf)).value - 4.0) <= kExactRel * 4, "V(Z*_inf(nu_2)) != 4");
    o.detail << "max rel err " << num(worst);
  });

  criterion(2, "Z_2 is the Euclidean ball", 0, [](Outcome& o) {
    Rng rng(2002);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const int n = 2 + i % 2;
      const auto mu = random_measure(n, rng);
      for (int k = 0; k < 1000; ++k) worst = std::max(worst, std::abs(support_Zp(mu, 2.0, random_unit_vector(n, rng)) - 1.0));
    }
    o.check(worst <= kZ2Identity, "max |h - 1| = " + num(worst));
    o.detail << "max |h - 1| " << num(worst);
  });

  criterion(3, "cross measure is extremal", kLimit3, [](Outcome& o) {
    stability::TheoremBOptions opt;
    opt.jobs = jobs();
    int rows = 0, failed = 0;
    for (int n : {2, 3})
      for (double p : {1.0, kInf}) {
        Rng rng(3000 + 10 * n + (p == 1.0 ? 1 : 2));
        std::vector<AtomicMeasure> fam;
        for (int i = 0; i < 200; ++i) fam.push_back(random_measure(n, rng));
        for (const auto& r : stability::theorem_b_suite(n, p, fam, opt)) {
          ++rows;
          if (!r.pass) {
            ++failed;
            o.check(false, r.tag + " " + r.label + " n=" + std::to_string(n) + " p=" + num(p));
          }
        }
      }
    o.detail << rows << " rows, " << failed << " failures";
  });

  criterion(4, "sharp S^1 constants", kLimit4, [](Outcome& o) {
    const auto h = stability::s1_sharp_check(equiangular_measure(3));
    o.check(std::abs(h.epsilon - kPi / 6) <= 1e-9, "eps != pi/6");
    o.check(std::abs(h.area_z - 3 * std::sqrt(3.0) / 2) <= kAreaExact, "V(Z_inf) not exact");
    o.check(std::abs(h.area_zstar - 2 * std::sqrt(3.0)) <= kAreaExact, "V(Z*_inf) not exact");
    o.check(std::abs(h.bound_z - 2.2618) <= 5e-5 && std::abs(h.bound_zstar - 3.7906) <= 5e-5, "bounds differ");
    o.check(h.pass, "hexagon fails");
    std::vector<AtomicMeasure> fam;
    std::vector<std::string> labels;
    for (auto& [l, m] : stability::s1_sweep_family()) {
      labels.push_back(l);
      fam.push_back(m);
    }
    int failed = 0;
    for (const auto& r : stability::s1_sharp_suite(fam, labels, jobs()))
      if (!r.pass) {
        ++failed;
        o.check(false, r.tag + " " + r.label);
      }
    o.check(fam.size() == 64, "sweep size");
    o.detail << "hexagon " << num(h.area_z) << " >= " << num(h.bound_z) << ", " << num(h.area_zstar) << " <= "
             << num(h.bound_zstar) << "; sweep " << fam.size() << " measures, " << failed << " failures";
  });

  criterion(5, "Ball-Barthe stability", 0, [](Outcome& o) {
    Rng rng(5005);
    double worst_res = 0.0, min_theta = kInf;
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + i % 2;
      std::uniform_int_distribution<int> kd(n + 1, 10);
      const int k = kd(rng);
      const auto sys = bb::DecompositionSystem::random(n, k, rng);
      std::uniform_real_distribution<double> lt(std::log(0.05), std::log(20.0));
      std::vector<double> t;
      for (int j = 0; j < k; ++j) t.push_back(std::exp(lt(rng)));
      const auto ex = bb::subset_expansion(sys, t);
      const auto th = bb::theta_star(sys, t);
      const double res = std::abs(ex.det_value - ex.expansion_sum) / std::abs(ex.expansion_sum);
      worst_res = std::max(worst_res, res);
      min_theta = std::min(min_theta, th.theta);
      o.check(res <= kCauchyBinet, "Cauchy-Binet residual " + num(res));
      o.check(th.theta >= 1.0 && th.strengthened_pass, "strengthened inequality at instance " + std::to_string(i));
    }
    o.detail << "max residual " << num(worst_res) << ", min theta " << num(min_theta);
  });

  criterion(6, "transport bounds", kLimit6, [](Outcome& o) {
    const std::vector<double> ps = {1, 1.2, 1.5, 1.9, 2.1, 2.3, 2.7, 3, 5, 10, kInf};
    int rows = 0;
    for (double p : ps) {
      const auto box = transport::verify_derivative_box(p, 256);
      const auto sec = transport::verify_second_derivative_bounds(p, 256);
      const auto mass = transport::verify_mass_transport(p, transport::open_grid(2.0, 256), kMassIdentity);
      rows += static_cast<int>(box.rows.size() + sec.rows.size() + mass.rows.size());
      for (const auto* r : {&box, &sec, &mass})
        o.check(r->pass, "p=" + num(p) + " " + (r->witness ? r->witness->quantity + " at t=" + num(r->witness->t) : ""));
    }
    o.detail << ps.size() << " exponents, " << rows << " grid rows";
  });

  criterion(7, "cap machinery", 0, [](Outcome& o) {
    Rng rng(7007);
    std::uniform_real_distribution<double> ad(1e-3, kPi / 2 - 1e-3);
    for (int i = 0; i < 500; ++i) {
      const int n = 2 + i % 2;
      const auto mu = random_measure(n, rng);
      const auto r = verify_isotropic_cap_bound(mu, SphereVector(random_unit_vector(n, rng)), ad(rng));
      o.check(r.pass, "isotropic cap bound at instance " + std::to_string(i));
    }
    for (int i = 0; i < 100; ++i) {
      const int n = 2 + i % 2;
      const auto dr = dvoretzky_rogers_caps(random_measure(n, rng));
      for (double m : dr.cap_masses) o.check(m >= std::pow(dr.beta, n) * (1 - 1e-12), "DR cap mass");
      o.check(dr.det >= 4 * n * dr.beta * (1 - 1e-12), "DR determinant");
    }
    std::uniform_real_distribution<double> sd(0.0, 1.0);
    for (int n : {2, 3, 4})
      for (int i = 0; i < 500; ++i) {
        const Mat q = random_orthogonal(n, rng);
        const double scale = 0.02 * sd(rng) / frame_factor(n);
        std::vector<Vec> u;
        for (int j = 0; j < n; ++j) u.push_back((q.col(j) + scale * random_unit_vector(n, rng)).normalized());
        double t = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) t = std::max(t, std::asin(std::min(1.0, std::abs(u[a].dot(u[b])))));
        o.check(fit_cross_frame(u, t).pass, "fit_cross_frame n=" + std::to_string(n));
      }
    o.detail << "500 cap bounds, 100 DR constructions, 1500 frame fits";
  });

  criterion(8, "Wasserstein-Hausdorff bound", 0, [](Outcome& o) {
    Rng rng(8008);
    double worst_ratio = 0.0;
    for (int i = 0; i < 100; ++i) {
      const int n = 2 + i % 2;
      const Mat frame = random_orthogonal(n, rng);
      const auto mu = stability::near_cross_measure(n, 0.3, rng, frame);
      const auto r = wasserstein_hausdorff_bound(mu, cross_measure(n, frame));
      o.check(r.hausdorff < kPi / 4 && r.pass, "instance " + std::to_string(i));
      if (r.bound > 0) worst_ratio = std::max(worst_ratio, r.wasserstein / r.bound);
    }
    int instances = 0;
    double worst_gap = 0.0;
    while (instances < 200) {
      const int n = 2 + instances % 2, pairs = 1 + instances % 4;
      auto draw = [&] {
        std::vector<Atom> half;
        for (int j = 0; j < pairs; ++j) half.push_back({SphereVector(random_unit_vector(n, rng)), 0.5});
        return AtomicMeasure::symmetrized(n, half);
      };
      const auto mu = draw(), nu = draw();
      if (mu.size() != nu.size() || mu.size() > 8) continue;
      const double gap = std::abs(wasserstein(mu, nu).cost - assignment_by_enumeration(mu, nu));
      worst_gap = std::max(worst_gap, gap);
      o.check(gap <= kAssignment, "LP vs enumeration gap " + num(gap));
      ++instances;
    }
    o.detail << "max W/bound " << num(worst_ratio) << "; 200 assignment checks, max gap " << num(worst_gap);
  });

  criterion(9, "cube sandwich and John position", 0, [](Outcome& o) {
    Rng rng(9009);
    for (int i = 0; i < 50; ++i) {
      const int n = 2 + i % 2;
      const auto mu = stability::near_cross_measure(n, 0.4 / (3 * n), rng);
      const double dh = hausdorff_spherical(mu.directions(), cross_points(Mat::Identity(n, n))).value;
      const auto r = cube_sandwich_check(mu, 0.5 * (dh + 1.0 / (3 * n)));
      o.check(r.pass, "sandwich instance " + std::to_string(i));
    }
    double worst_shape = 0.0, worst_contact = 0.0;
    for (int n : {2, 3}) {
      const auto j = john_ellipsoid(cube(n));
      worst_shape = std::max(worst_shape, (j.ellipsoid.A - Mat::Identity(n, n)).cwiseAbs().maxCoeff());
      const auto mu = contact_measure(cube(n));
      const auto cross = cross_measure(n);
      o.check(mu.size() == static_cast<std::size_t>(2 * n), "contact count");
      for (const auto& a : mu.atoms()) {
        double near = kInf;
        for (const auto& b : cross.atoms()) near = std::min(near, (a.u.coords() - b.u.coords()).norm());
        worst_contact = std::max({worst_contact, near, std::abs(a.c - 0.5)});
      }
    }
    o.check(worst_shape <= kJohnShape, "John shape deviation " + num(worst_shape));
    o.check(worst_contact <= kContact, "contact measure deviation " + num(worst_contact));
    o.detail << "50 sandwiches; John deviation " << num(worst_shape) << ", contact deviation " << num(worst_contact);
  });

  criterion(10, "planar square chain on octagons", 0, [](Outcome& o) {
    double worst_id = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = 0.05 * i;
      const auto c = stability::planar_chain(stability::octagon_body(t, t), true, 10010);
      const double ds = std::abs(c.perimeter_m - (1 + (std::sqrt(2.0) - 1) * t) * 8.0) / 8.0;
      const double dv = std::abs(c.area_q - (1 + t) * 4.0) / 4.0;
      worst_id = std::max({worst_id, ds, dv});
      o.check(ds <= kPlanarIdentity && dv <= kPlanarIdentity, "identity at t=" + num(t));
      o.check(c.t <= 18 * c.deficit + 1e-12, "t <= 18 eps at t=" + num(t));
      o.check(c.delta_vol <= 54 * c.deficit + 1e-12, "delta_vol <= 54 eps at t=" + num(t));
      o.check(c.pass, "chain at t=" + num(t));
    }
    o.detail << "11 octagons, max identity error " << num(worst_id);
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
