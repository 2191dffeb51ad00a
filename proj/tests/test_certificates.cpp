#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "polaron/certificates.hpp"

using namespace polaron;
using std::numbers::pi;

namespace {

// layout + admissible particle positions (one per small ball, at its center)
struct Instance {
  BallLayout balls;
  ClusterLayout layout;
  std::vector<Vec3> positions;
};

Instance random_instance(std::uint64_t seed, int max_n = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-6, 6);
  std::uniform_int_distribution<int> nd(2, max_n);
  Instance inst;
  inst.balls.small_radius = 0.3;
  int N = nd(rng);
  while (int(inst.balls.centers.size()) < N) {
    Vec3 c{u(rng), u(rng), u(rng)};
    bool ok = true;
    for (const Vec3& p : inst.balls.centers)
      if (dist(p, c) < 4 * inst.balls.small_radius) ok = false;
    if (ok) inst.balls.centers.push_back(c);
  }
  inst.layout = regroup_balls(inst.balls);
  inst.positions = inst.balls.centers;
  return inst;
}

}  // namespace

TEST_CASE("localization penalty") {
  CHECK(localization_penalty(1, pi) == doctest::Approx(2.25));
  CHECK(localization_penalty(4, 3.0) == doctest::Approx(pi * pi));
  CHECK(localization_penalty(2, 1e6) < 1e-10);
  CHECK_THROWS(localization_penalty(1, 0.0));
  CHECK_THROWS(localization_penalty(0, 1.0));
}

TEST_CASE("interball penalty") {
  SUBCASE("single group flagged zero") {
    ClusterLayout cl = regroup_balls({{{0, 0, 0}}, 1.0});
    InterballPenalty p = interball_penalty(1.0, 1, cl);
    CHECK(p.single_group);
    CHECK(p.value == 0.0);
  }

  SUBCASE("two singletons at separation 1") {
    // alpha=1, N=2, both groups have n_i=1, d_i=1: (8*2/pi^2)(1+1) = 32/pi^2
    ClusterLayout cl = regroup_balls({{{0, 0, 0}, {3, 0, 0}}, 1.0});
    REQUIRE(cl.m() == 2);
    REQUIRE(cl.groups[0].separation == doctest::Approx(1.0));
    InterballPenalty p = interball_penalty(1.0, 2, cl);
    CHECK(p.value == doctest::Approx(32.0 / (pi * pi)));
  }

  SUBCASE("doubling separations halves the value") {
    ClusterLayout a = regroup_balls({{{0, 0, 0}, {4, 0, 0}}, 1.0});
    ClusterLayout b = regroup_balls({{{0, 0, 0}, {6, 0, 0}}, 1.0});
    REQUIRE(a.m() == 2);
    REQUIRE(b.m() == 2);
    // separations 2 and 4
    double va = interball_penalty(1.0, 2, a).value;
    double vb = interball_penalty(1.0, 2, b).value;
    CHECK(vb == doctest::Approx(va / 2));
  }
}

TEST_CASE("F1 bound checks") {
  SUBCASE("single group is trivially zero") {
    Instance inst;
    inst.balls = {{{0, 0, 0}}, 0.5};
    inst.layout = regroup_balls(inst.balls);
    ErrorTermCheck c = f1_check(1.0, inst.layout, inst.balls.centers, 10000, 1);
    CHECK(c.pass);
    CHECK(c.estimate.mean == 0.0);
    CHECK(c.bound == 0.0);
  }

  SUBCASE("two singletons obey the bound and F1 > 0") {
    BallLayout bl{{{-2, 0, 0}, {2, 0, 0}}, 0.3};
    ClusterLayout cl = regroup_balls(bl);
    REQUIRE(cl.m() == 2);
    ErrorTermCheck c = f1_check(1.0, cl, bl.centers, 400000, 2);
    CHECK(c.pass);
    CHECK(c.estimate.mean > 0.0);
    CHECK(c.bound == doctest::Approx(2 * (8.0 / (pi * pi)) *
                                     (1 / cl.groups[0].separation +
                                      1 / cl.groups[1].separation)));
  }

  SUBCASE("moving groups apart decreases F1") {
    double prev = 1e300;
    for (double d : {4.0, 8.0, 16.0}) {
      BallLayout bl{{{-d / 2, 0, 0}, {d / 2, 0, 0}}, 0.3};
      ClusterLayout cl = regroup_balls(bl);
      ErrorTermCheck c = f1_check(1.0, cl, bl.centers, 300000, 5);
      CHECK(c.estimate.mean < prev + 3 * c.estimate.std_error);
      prev = c.estimate.mean;
    }
  }
}

TEST_CASE("F2 bound checks") {
  SUBCASE("two singletons at distance 1 stay below 2 alpha") {
    BallLayout bl{{{-0.5, 0, 0}, {0.5, 0, 0}}, 0.2};
    ClusterLayout cl = regroup_balls(bl);
    REQUIRE(cl.m() == 2);
    ErrorTermCheck c = f2_check(1.0, cl, bl.centers, 400000, 3);
    CHECK(c.bound == doctest::Approx(2.0));  // 2 alpha / |x1-x2|
    CHECK(c.pass);
    CHECK(c.estimate.mean > 0.0);
    // the unrestricted integral equals the bound, so the restricted one
    // cannot exceed it by more than noise
    CHECK(c.estimate.mean - 3 * c.estimate.std_error <= 2.0);
  }

  SUBCASE("bound halves when the pair distance doubles") {
    BallLayout a{{{-1, 0, 0}, {1, 0, 0}}, 0.2};
    BallLayout b{{{-2, 0, 0}, {2, 0, 0}}, 0.2};
    ErrorTermCheck ca = f2_check(1.0, regroup_balls(a), a.centers, 10000, 4);
    ErrorTermCheck cb = f2_check(1.0, regroup_balls(b), b.centers, 10000, 4);
    CHECK(cb.bound == doctest::Approx(ca.bound / 2));
  }

  SUBCASE("random instances pass") {
    for (int t = 0; t < 10; ++t) {
      Instance inst = random_instance(900 + t);
      ErrorTermCheck c1 = f1_check(1.0, inst.layout, inst.positions, 200000, t);
      ErrorTermCheck c2 = f2_check(1.0, inst.layout, inst.positions, 200000, t);
      CHECK(c1.pass);
      CHECK(c2.pass);
    }
  }
}

TEST_CASE("cutoff certificates") {
  SUBCASE("beta boundary flagged invalid") {
    CutoffCertificates c = cutoff_certificates(1.0, 1, 8.0 / pi, 1.0, 1.0);
    CHECK(c.beta == doctest::Approx(0.0));
    CHECK(!c.valid);
  }

  SUBCASE("proof's eps2 choice gives beta = 1 - eps2") {
    double alpha = 0.7, Lambda = 40.0;
    int N = 3;
    double eps2 = 8 * alpha * N / (pi * Lambda);
    CutoffCertificates c = cutoff_certificates(alpha, N, Lambda, 0.5, eps2);
    CHECK(c.beta == doctest::Approx(1 - eps2));
    CHECK(c.valid);
  }

  SUBCASE("large cutoff monotonicity") {
    CutoffCertificates a = cutoff_certificates(1.0, 1, 100.0, 0.5, 0.5);
    CutoffCertificates b = cutoff_certificates(1.0, 1, 1000.0, 0.5, 0.5);
    CHECK(b.beta > a.beta);
    CHECK(b.beta < 1.0);
    CHECK(b.af_term > a.af_term);
    CHECK(b.ag_number_term < a.ag_number_term);
    CHECK(a.constant == -0.5);
  }
}

TEST_CASE("block modes") {
  SUBCASE("one cell covers a small ball") {
    BlockModeSet s = block_modes(1.0, 2.0);
    CHECK(s.modes.size() == 1);
    CHECK(s.count_bound == doctest::Approx(8.0));
    CHECK(s.count_ok());
    CHECK(s.sum_M2 == doctest::Approx(4 * pi).epsilon(1e-3));
  }

  SUBCASE("sum of M_n^2 recovers 4 pi Lambda") {
    for (auto [Lambda, P] : {std::pair{3.0, 1.0}, {5.0, 2.0}, {2.0, 0.7}}) {
      BlockModeSet s = block_modes(Lambda, P);
      CHECK(s.count_ok());
      CHECK(std::abs(s.sum_M2 - 4 * pi * Lambda) / (4 * pi * Lambda) < 1e-3);
    }
  }

  SUBCASE("rejects P outside (0, 2 Lambda]") {
    CHECK_THROWS_AS(block_modes(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(block_modes(1.0, 2.5), std::domain_error);
  }

  SUBCASE("count bound for 50 random pairs") {
    // the count bound concerns the cutoff regime Lambda >> P
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ul(1.0, 8.0), up(0.3, 3.0);
    for (int t = 0; t < 50; ++t) {
      double Lambda = ul(rng);
      double P = std::min(up(rng), Lambda / 2);
      BlockModeSet s = block_modes(Lambda, P, 3);
      CHECK(s.count_ok());
    }
  }
}

TEST_CASE("theorem 1 budget") {
  SUBCASE("localization at the canonical R") {
    // R = N^-1 alpha^{-19/23} turns 9 N pi^2 / 4R^2 into (9 pi^2/4) N^3 a^{38/23}
    double alpha = 2000.0;
    int N = 3;
    ErrorBudget b = theorem1_budget(alpha, N, 1.0, 1.0);
    double expected =
        2.25 * pi * pi * std::pow(double(N), 3) * std::pow(alpha, 38.0 / 23.0);
    CHECK(b.localization == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("corollary R^2 term collapses to 3 N^3 alpha^{42/23}") {
    double alpha = 5000.0;
    int N = 4;
    ErrorBudget b = theorem1_budget(alpha, N, 1.0, 1.0);
    CHECK(b.corollary_r2_term ==
          doctest::Approx(3 * std::pow(double(N), 3) *
                          std::pow(alpha, 42.0 / 23.0))
              .epsilon(1e-12));
  }

  SUBCASE("total sums the items") {
    ErrorBudget b = theorem1_budget(1e4, 2, 1.5, 0.8);
    double s = b.localization + b.interball + b.cutoff_half +
               b.blockmode_count_term + b.corollary_r2_term + b.corollary_c_term;
    CHECK(b.total == doctest::Approx(s).epsilon(1e-14));
    for (double item : {b.localization, b.interball, b.cutoff_half,
                        b.blockmode_count_term, b.corollary_r2_term,
                        b.corollary_c_term})
      CHECK(item >= 0.0);
  }

  SUBCASE("beta guard") {
    CHECK_THROWS_AS(theorem1_budget(0.9, 1, 1.0, 1.0), std::domain_error);
  }

  SUBCASE("R trade off: unimodal scan, paper R near the optimum") {
    // the explicit R-dependent terms trade localization decay against the
    // R^2 growth; at large alpha the canonical choice sits at the minimum
    double alpha = 1e5;
    int N = 1;
    double Rp = std::pow(alpha, -19.0 / 23.0);
    std::vector<double> totals;
    std::vector<double> Rs;
    for (double f = 0.25; f <= 4.01; f *= 1.05) {
      Rs.push_back(f * Rp);
      totals.push_back(theorem1_budget_at_R(alpha, N, 0.01, 0.01, f * Rp).total);
    }
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < totals.size(); ++i)
      if (totals[i] < totals[argmin]) argmin = i;
    // nonincreasing then nondecreasing around the argmin
    for (std::size_t i = 1; i <= argmin; ++i) CHECK(totals[i] <= totals[i - 1] + 1e-9);
    for (std::size_t i = argmin + 1; i < totals.size(); ++i)
      CHECK(totals[i] >= totals[i - 1] - 1e-9);
    CHECK(std::abs(Rs[argmin] - Rp) / Rp < 0.10);
  }
}

TEST_CASE("scaling identity") {
  auto make_state = [](int N, std::uint64_t seed) {
    Grid3D g = Grid3D::cubic(16, 12.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nrm;
    HartreeState st;
    for (int j = 0; j < N; ++j) {
      GridFunction f(g);
      // smooth random field: few low-frequency plane waves
      for (int m = 0; m < 6; ++m) {
        Vec3 k{2 * pi * std::round(nrm(rng)) / g.box[0],
               2 * pi * std::round(nrm(rng)) / g.box[1],
               2 * pi * std::round(nrm(rng)) / g.box[2]};
        std::complex<double> a{nrm(rng), nrm(rng)};
        for (int ix = 0; ix < g.n[0]; ++ix)
          for (int iy = 0; iy < g.n[1]; ++iy)
            for (int iz = 0; iz < g.n[2]; ++iz) {
              Vec3 x = g.coord(ix, iy, iz);
              f.values[g.index(ix, iy, iz)] +=
                  a * std::exp(std::complex<double>(0, dot(k, x)));
            }
      }
      st.orbitals.push_back(std::move(f));
    }
    st.normalize();
    return st;
  };

  SUBCASE("free fields, alpha = 3") {
    HartreeState st = make_state(2, 11);
    PolaronParams params{2, 1.0, 0.5};
    CHECK(scaling_identity_check(make_zero_field(), params, st, 3.0) < 1e-12);
  }

  SUBCASE("uniform magnetic field, alpha = 2") {
    HartreeState st = make_state(1, 12);
    PolaronParams params{1, 1.0, 0.0};
    CHECK(scaling_identity_check(make_linear_A({0, 0, 0.4}), params, st, 2.0) <
          1e-12);
  }

  SUBCASE("alpha = 1 is exact") {
    HartreeState st = make_state(1, 13);
    PolaronParams params{1, 1.0, 0.0};
    CHECK(scaling_identity_check(make_zero_field(), params, st, 1.0) < 1e-14);
  }
}

TEST_CASE("hardy lower bound") {
  CHECK(hardy_lower_bound(1, 0.5, 0.0) == doctest::Approx(-2.0));
  CHECK(hardy_lower_bound(2, 0.5, 0.0) == doctest::Approx(8 * hardy_lower_bound(1, 0.5, 0.0)));
  CHECK_THROWS(hardy_lower_bound(1, 0.0, 1.0));
  CHECK_THROWS(hardy_lower_bound(1, 1.0, 1.0));
}
