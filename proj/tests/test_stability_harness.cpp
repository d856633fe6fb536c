#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "isozonoid/io.hpp"
#include "isozonoid/stability_harness.hpp"
#include "test_util.hpp"

using namespace isozonoid;
using namespace isozonoid::stability;

TEST(Families, TiltedPair) {
  for (int n : {2, 3})
    for (double a : {0.0, 0.2, 0.6, 0.78}) {
      const auto mu = tilted_pair_measure(n, a);
      EXPECT_TRUE(check_isotropy(mu).is_isotropic) << n << " " << a;
      EXPECT_TRUE(mu.even());
      EXPECT_NEAR(mu.total_mass(), n, 1e-12);
    }
  EXPECT_CODE(tilted_pair_measure(2, kPi / 4), ErrorCode::Infeasible);
  EXPECT_EQ(to_string(FamilyKind::SplitCluster), std::string("SPLIT_CLUSTER"));
}

TEST(Families, AllKindsAreEvenIsotropic) {
  const auto t = perturbation_family(FamilyKind::TiltedPair, 3, {0.1, 0.3});
  const auto e = perturbation_family(FamilyKind::Equiangular, 2, {3, 5, 7});
  const auto r = perturbation_family(FamilyKind::RandomIsotropic, 3, {4, 6, 8}, 9);
  const auto s = perturbation_family(FamilyKind::SplitCluster, 2, {0.1, 0.4});
  for (const auto* fam : {&t, &e, &r, &s})
    for (const auto& mu : *fam) {
      EXPECT_TRUE(check_isotropy(mu).is_isotropic);
      EXPECT_TRUE(mu.even());
    }
  // Same seed, same family.
  const auto r2 = perturbation_family(FamilyKind::RandomIsotropic, 3, {4, 6, 8}, 9);
  for (std::size_t i = 0; i < r.size(); ++i)
    EXPECT_EQ(io::to_json(r[i]).dump(), io::to_json(r2[i]).dump());
  EXPECT_CODE(perturbation_family(FamilyKind::Equiangular, 3, {3}), ErrorCode::InvalidArgument);
}

TEST(Invariance, OrthogonalImagesKeepVolumesAndDistances) {
  Rng rng(55);
  const auto mu = random_isotropic_measure(3, 6, rng);
  const Mat q = random_orthogonal(3, rng);
  const auto moved = mu.transformed(q);
  EXPECT_TRUE(check_isotropy(moved).is_isotropic);
  for (double p : {1.0, kInf})
    EXPECT_NEAR(volume(body_Zp(moved, p)).value, volume(body_Zp(mu, p)).value, 1e-10) << p;
  EXPECT_NEAR(volume(body_Zp_star(moved, 3.0)).value, volume(body_Zp_star(mu, 3.0)).value, 1e-6);
  const auto mu2 = equiangular_measure(5, 0.3);
  EXPECT_NEAR(wasserstein_to_cross(mu2.transformed(rotation2(1.1))).value, wasserstein_to_cross(mu2).value, 1e-9);
}

TEST(TheoremB, RandomMeasuresAndEquality) {
  const auto fam = perturbation_family(FamilyKind::RandomIsotropic, 2, {3, 4, 5, 6}, 21);
  for (double p : {1.0, kInf}) {
    const auto rows = theorem_b_suite(2, p, fam);
    ASSERT_EQ(rows.size(), 2 * fam.size());
    EXPECT_TRUE(all_pass(rows)) << p;
    for (const auto& r : rows) EXPECT_TRUE(r.tag == "theoremB.Z" || r.tag == "theoremB.Zstar");
  }
  const auto eq = theorem_b_suite(3, 1.0, {cross_measure(3, rotation3(make_vec({0.1, 0.2, 0.3})))});
  EXPECT_TRUE(all_pass(eq));
  EXPECT_NEAR(eq[0].epsilon, 0.0, 1e-6);
  EXPECT_NEAR(eq[0].deficit, 0.0, 1e-9);
}

TEST(SharpS1, Hexagon) {
  const auto r = s1_sharp_check(equiangular_measure(3));
  EXPECT_NEAR(r.epsilon, kPi / 6, 1e-9);
  EXPECT_NEAR(r.bound_z, 2.2618, 1e-4);
  EXPECT_NEAR(r.bound_zstar, 3.79056, 1e-5);
  EXPECT_NEAR(r.area_z, 3 * std::sqrt(3.0) / 2, 1e-12);
  EXPECT_NEAR(r.area_zstar, 2 * std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(SharpS1, SweepAndLemmas) {
  std::vector<AtomicMeasure> fam;
  std::vector<std::string> labels;
  for (auto& [l, m] : s1_sweep_family()) {
    labels.push_back(l);
    fam.push_back(m);
  }
  EXPECT_EQ(fam.size(), 64u);
  const auto rows = s1_sharp_suite(fam, labels, 2);
  EXPECT_EQ(rows.size(), 128u);
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.tag << " " << r.label << " " << r.note;
  const auto lem = s1_lemma_checks(64);
  EXPECT_EQ(lem.size(), 5u);
  EXPECT_TRUE(all_pass(lem));
}

TEST(SharpS1, Properness) {
  EXPECT_NEAR(max_support_gap(cross_points(Mat::Identity(2, 2))), kPi / 2, 1e-15);
  EXPECT_CODE(require_proper({unit(2, 0), -unit(2, 0), make_vec({0.1, 1}), make_vec({-0.1, -1})}),
              ErrorCode::NotProper);
}

TEST(Trends, TiltedFamilyIsMonotone) {
  TrendOptions o;
  o.monotone = true;
  const auto fam = perturbation_family(FamilyKind::TiltedPair, 2, {0.05, 0.15, 0.3, 0.45});
  for (double p : {1.0, 3.0, kInf}) {
    const auto rows = zpmustab_consistency(2, p, fam, o);
    for (const auto& r : rows) EXPECT_TRUE(r.pass) << p << " " << r.label << " " << r.note;
  }
  const auto zero = zpmustab_consistency(2, 1.0, {cross_measure(2, rotation2(0.3))});
  EXPECT_TRUE(zero[0].pass);
  EXPECT_CODE(zpmustab_consistency(2, 2.0, fam), ErrorCode::InvalidArgument);
}

TEST(Planar, OctagonDeficitAndIdentities) {
  for (double t : {0.0, 0.2, 0.5}) {
    const auto c = planar_chain(octagon_body(t, t), false);
    // Four triangles of area t on W^2, eight edges of length sqrt(1 + t^2).
    EXPECT_NEAR(c.deficit, t * (1 - t) / (1 + t), 1e-12) << t;
    EXPECT_NEAR(c.area_q, 4 * (1 + t), 1e-12);
    EXPECT_NEAR(c.perimeter_m, c.perimeter_m_formula, 1e-12);
    EXPECT_TRUE(c.identities);
    EXPECT_TRUE(c.square_inscribed);
    EXPECT_TRUE(c.pass) << t;
  }
}

TEST(Planar, NormalizedSuite) {
  const auto r = planar_suite(cut_corner_square(0.3), "cut");
  EXPECT_TRUE(r.pass) << r.note;
  EXPECT_EQ(r.tag, "planar");
  const auto h = planar_suite(regular_hexagon(), "hex");
  EXPECT_TRUE(h.pass) << h.note;
  EXPECT_CODE(square_normalization(body_Zp_star(cross_measure(2), 3.0)), ErrorCode::NoSquareNormalization);
}

TEST(Reviso, CubesHexagonAndTruncations) {
  RevisoOptions o;
  o.bm_starts = 8;
  o.vol_starts = 2;
  const auto rows = reverse_isoperimetric_suite({cube(2), regular_hexagon(), cube(3), truncated_cube(0.3)},
                                                {"W2", "hexagon", "W3", "trunc"}, o);
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.label << " " << r.note;
  EXPECT_NEAR(rows[0].deficit, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].epsilon, 0.0, 1e-6);
  EXPECT_GT(rows[1].deficit, 0.0);
  EXPECT_NEAR(isoperimetric_deficit(regular_hexagon()), 1 - 36.0 / (3 * std::sqrt(3.0) / 2) / 16.0, 1e-12);
}

TEST(ComponentSuites, AllPass) {
  EXPECT_TRUE(all_pass(transport_suite({1.0, 1.5, 2.0, 3.0, kInf}, 64)));
  EXPECT_TRUE(all_pass(ballbarthe_suite(20, 5)));
  EXPECT_TRUE(all_pass(caps_suite(20, 5)));
}

TEST(Parallel, DeterministicAndOrdered) {
  const std::function<double(std::size_t)> f = [](std::size_t i) {
    Rng rng(derive_seed(7, i));
    return std::uniform_real_distribution<double>(0, 1)(rng);
  };
  EXPECT_EQ(parallel_map<double>(50, 1, f), parallel_map<double>(50, 4, f));
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
  std::atomic<int> calls{0};
  try {
    parallel_map<int>(10, 3, [&](std::size_t i) -> int {
      ++calls;
      if (i == 3 || i == 7) throw Error(i == 3 ? ErrorCode::Domain : ErrorCode::EmptySet, "x");
      return 0;
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Domain);
  }
  EXPECT_EQ(calls.load(), 10);
}

TEST(Io, MeasureAndBodyRoundTrip) {
  const auto mu = equiangular_measure(5, 0.1);
  const auto back = io::measure_from_json(nlohmann::json::parse(io::to_json(mu).dump()));
  ASSERT_EQ(back.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    EXPECT_EQ(back.atoms()[i].c, mu.atoms()[i].c);
    EXPECT_LE((back.atoms()[i].u.coords() - mu.atoms()[i].u.coords()).norm(), 1e-15);
  }
  const auto k = truncated_cube(0.2);
  const auto kb = io::body_from_json(nlohmann::json::parse(io::to_json(k).dump()));
  EXPECT_EQ(kb.kind(), BodyKind::HRep);
  EXPECT_NEAR(volume(kb).value, volume(k).value, 1e-12);
  EXPECT_CODE(io::body_from_json(nlohmann::json::parse(R"({"dim":2,"kind":"X","data":[[1,0]]})")),
              ErrorCode::InvalidArgument);
  EXPECT_CODE(io::measure_from_json(nlohmann::json::parse(R"({"atoms":[]})")), ErrorCode::InvalidArgument);
}

TEST(Io, ReportFormats) {
  StabilityReport r{"s1.Zinf", "a,b", 2, kInf, 0.5, "delta_HO", 1.25, 2.0, false, 1e-12, 3.5, "say \"hi\""};
  const auto j = io::to_json(r);
  EXPECT_EQ(j["p"], "inf");
  EXPECT_FALSE(j.contains("runtime_ms"));
  EXPECT_TRUE(io::to_json(r, true).contains("runtime_ms"));
  const auto csv = io::to_csv({r});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tag,label,n,p,epsilon,distance,deficit,bound,pass,tolerance,note");
  EXPECT_NE(csv.find("\"a,b\""), std::string::npos);
  EXPECT_NE(csv.find("\"say \"\"hi\"\"\""), std::string::npos);
  EXPECT_NE(csv.find(",inf,0.5,"), std::string::npos);
  EXPECT_EQ(io::read_number(nlohmann::json("inf")), kInf);
}
