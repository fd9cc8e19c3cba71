#include <doctest.h>

#include <cmath>
#include <vector>

#include "prs/constants.hpp"
#include "prs/rate_engine.hpp"
#include "scenarios.hpp"

using namespace prs;
using constants::angular;

namespace {

SpectroscopyScenario small(const SpectroscopyScenario& base, int n_max) {
  SpectroscopyScenario s = base;
  s.grid = {n_max, n_max};
  return s;
}

double column_sum_error(const RateMatrix& m) {
  const Eigen::RowVectorXd sums = Eigen::RowVectorXd::Ones(m.dimension()) * Eigen::MatrixXd(m.generator);
  return sums.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("population state layout") {
  PopulationState s(GridBounds{2, 3});
  CHECK(s.dimension() == 2 * 3 * 4 + 1);
  s.at(InternalState::excited, 2, 3) = 0.25;
  s.at(InternalState::ground, 2, 3) = 0.5;
  s.leaked() = 0.25;
  CHECK(s.marginal(2, 3) == 0.75);
  CHECK(s.in_grid() == 0.75);
  CHECK(s.values()[s.dimension() - 1] == 0.25);
  const auto copy = PopulationState::from_vector(s.grid(), s.to_vector());
  CHECK(copy.at(InternalState::excited, 2, 3) == 0.25);
  CHECK_THROWS(PopulationState::from_vector(s.grid(), Eigen::VectorXd::Zero(3)));
}

TEST_CASE("dark, cold, non-decaying scenario has a zero generator") {
  auto sc = preset("mg24_ca40", {"laser.intensity_w_m2=0", "heating.ip_per_s=0", "heating.op_per_s=0",
                                 "emission.enabled=false"}).scenario;
  const auto m = build_rate_matrix(small(sc, 3), 0.0);
  CHECK(m.generator.norm() == 0.0);
  const auto p0 = PopulationState::motional_ground(m.grid);
  const auto p = evolve(m, p0, 1.0);
  CHECK((p.state.to_vector() - p0.to_vector()).norm() == 0.0);
}

TEST_CASE("generator is conservative with non-negative rates") {
  for (const char* name : {"mg24_ca40", "mgh24_ca40"}) {
    const auto sc = preset(name).scenario;
    const RateModel model(sc);
    for (double delta : {0.0, angular(37e6)}) {
      const auto m = model.build(delta);
      CHECK(m.dimension() == 801);
      CHECK(column_sum_error(m) < 1e-9 * sc.line.gamma_t + 1e-9);
      for (int k = 0; k < m.generator.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m.generator, k); it; ++it) {
          if (it.row() != it.col()) CHECK(it.value() >= 0.0);
        }
      // the leak is absorbing
      CHECK(Eigen::MatrixXd(m.generator).col(m.dimension() - 1).norm() == 0.0);
    }
  }
}

TEST_CASE("generator entries match a hand-assembled one on the smallest grid") {
  auto sc = small(preset("mg24_ca40").scenario, 1);
  sc.sidebands = {1, 1};
  const RateModel model(sc);
  const double delta = angular(5e6);
  const auto m = Eigen::MatrixXd(model.build(delta).generator);
  const double ra = model.absorption_rate(delta);
  const double rs = model.stimulated_rate(delta);
  const LambDicke eta = sc.laser_lamb_dicke();
  const auto& d = model.emission();
  const PopulationState layout(sc.grid);
  auto idx = [&](InternalState i, int a, int b) { return static_cast<Eigen::Index>(layout.index(i, a, b)); };
  const auto g = InternalState::ground;
  const auto e = InternalState::excited;
  // g(0,0) -> e(1,0) is an in-grid blue sideband of the in-phase mode
  CHECK(m(idx(e, 1, 0), idx(g, 0, 0)) == doctest::Approx(ra * std::norm(xi(eta, {0, 0}, {1, 0}))).epsilon(1e-12));
  // e(1,1) -> g(0,1): stimulated plus spontaneous red sideband
  CHECK(m(idx(g, 0, 1), idx(e, 1, 1)) ==
        doctest::Approx(rs * std::norm(xi(eta, {1, 1}, {-1, 0})) + sc.line.gamma_t * d({1, 1}, {-1, 0})).epsilon(1e-12));
  // heating g(0,1) -> g(1,1)
  CHECK(m(idx(g, 1, 1), idx(g, 0, 1)) == doctest::Approx(sc.heating.ip));
  // everything from g(1,1) with s_ip = +1 or s_op = +1 leaks, plus both heating steps
  double leak = sc.heating.ip + sc.heating.op;
  for (int s = -1; s <= 1; ++s)
    for (int t = -1; t <= 1; ++t)
      if (s == 1 || t == 1) leak += ra * std::norm(xi(eta, {1, 1}, {s, t}));
  CHECK(m(m.rows() - 1, idx(g, 1, 1)) == doctest::Approx(leak).epsilon(1e-12));
}

TEST_CASE("carrier-only limit reaches detailed balance") {
  // a huge wavelength makes every sideband negligible
  auto cfg = preset("mg24_ca40", {"transition.wavelength_m=1.0", "heating.ip_per_s=0", "heating.op_per_s=0",
                                  "laser.intensity_saturation_fraction=0.8"});
  auto sc = small(cfg.scenario, 1);
  const RateModel model(sc);
  const double delta = angular(12e6);
  const double ra = model.absorption_rate(delta);
  const double rs = model.stimulated_rate(delta);
  const double down = rs + sc.line.gamma_t * model.emission()({0, 0}, {0, 0});
  const auto p = evolve(model.build(delta), PopulationState::motional_ground(sc.grid), 1e3 / sc.line.gamma_t);
  const double pg = p.state.at(InternalState::ground, 0, 0);
  const double pe = p.state.at(InternalState::excited, 0, 0);
  CHECK(pe / pg == doctest::Approx(ra / down).epsilon(1e-9));
  CHECK(pg + pe == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("heating ladder follows the Poisson law") {
  auto sc = small(preset("mg24_ca40", {"laser.intensity_w_m2=0", "heating.ip_per_s=0", "heating.op_per_s=1.7",
                                              "emission.enabled=false"}).scenario, 6);
  const auto m = build_rate_matrix(sc, 0.0);
  for (double t : {1e-3, 1e-2, 0.3}) {
    const auto p = evolve(m, PopulationState::motional_ground(sc.grid), t).state;
    const double x = 1.7 * t;
    CHECK(p.marginal(0, 1) == doctest::Approx(x * std::exp(-x)).epsilon(1e-10));
    CHECK(p.marginal(0, 2) == doctest::Approx(x * x / 2 * std::exp(-x)).epsilon(1e-10));
    if (t < 0.01) CHECK(p.marginal(0, 1) == doctest::Approx(1.7 * t).epsilon(2 * x));
  }
}

TEST_CASE("adaptive stepping agrees with the matrix exponential on an 8x8 grid") {
  for (const char* name : {"mg24_ca40", "mgh24_ca40"}) {
    const auto cfg = preset(name);
    const auto sc = small(cfg.scenario, 7);
    const auto m = build_rate_matrix(sc, angular(20e6));
    const auto p0 = PopulationState::motional_ground(sc.grid);
    EvolutionOptions adaptive;
    adaptive.method = EvolutionMethod::adaptive;
    const double t = cfg.scan.tau_spec;
    const auto a = evolve(m, p0, t, adaptive).state.to_vector();
    const auto b = evolve(m, p0, t).state.to_vector();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Mg resonance dynamics") {
  const auto cfg = preset("mg24_ca40");
  const RateModel model(cfg.scenario);
  const auto m = model.build(0.0);
  std::vector<double> times;
  for (int i = 0; i <= 53; ++i) times.push_back(5.3e-3 * i / 53);
  const auto series = evolve_series(m, PopulationState::motional_ground(cfg.scenario.grid), times);
  for (std::size_t i = 1; i < series.size(); ++i) {
    CHECK(series[i].state.marginal(0, 0) <= series[i - 1].state.marginal(0, 0) + 1e-12);
    CHECK(series[i].state.in_grid() + series[i].state.leaked() == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK_FALSE(series.back().leak_warning);
  // motional excitation starts linearly
  const auto p1 = evolve(m, PopulationState::motional_ground(cfg.scenario.grid), 2e-6).state.marginal(0, 1);
  const auto p2 = evolve(m, PopulationState::motional_ground(cfg.scenario.grid), 4e-6).state.marginal(0, 1);
  CHECK(p2 / p1 == doctest::Approx(2.0).epsilon(0.05));
  // series and single-shot evolution agree
  const auto direct = evolve(m, PopulationState::motional_ground(cfg.scenario.grid), 5.3e-3).state.to_vector();
  CHECK((direct - series.back().state.to_vector()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("detuning symmetry") {
  const auto sc = small(preset("mg24_ca40").scenario, 6);
  const RateModel model(sc);
  const auto p0 = PopulationState::motional_ground(sc.grid);
  const auto plus = evolve(model.build(angular(23e6)), p0, 2e-3).state.to_vector();
  const auto minus = evolve(model.build(angular(-23e6)), p0, 2e-3).state.to_vector();
  CHECK((plus - minus).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scaled-time collapse without heating and spontaneous emission") {
  auto cfg = preset("mg24_ca40", {"heating.ip_per_s=0", "heating.op_per_s=0", "emission.enabled=false"});
  auto sc1 = small(cfg.scenario, 8);
  auto sc2 = sc1;
  sc2.laser.intensity *= 2.0;
  const auto p0 = PopulationState::motional_ground(sc1.grid);
  const double t = 3e-3;
  const auto a = evolve(build_rate_matrix(sc1, angular(10e6)), p0, t).state.to_vector();
  const auto b = evolve(build_rate_matrix(sc2, angular(10e6)), p0, t / 2).state.to_vector();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(scaled_time(t, sc1) == doctest::Approx(scaled_time(t / 2, sc2)));
}

TEST_CASE("scaled time round trip and errors") {
  const auto sc = preset("mgh24_ca40").scenario;
  CHECK(spectroscopy_time(scaled_time(0.05, sc), sc) == doctest::Approx(0.05));
  auto dark = sc;
  dark.laser.intensity = 0.0;
  CHECK_THROWS_AS(spectroscopy_time(1.0, dark), std::domain_error);
  auto bad = sc;
  bad.heating.ip = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  const auto m = build_rate_matrix(small(sc, 2), 0.0);
  PopulationState unnormalized(m.grid);
  CHECK_THROWS_AS(evolve(m, unnormalized, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve(m, PopulationState::motional_ground(m.grid), -1.0), std::invalid_argument);
}

TEST_CASE("leak warning is raised above the threshold") {
  auto sc = small(preset("mg24_ca40").scenario, 2);
  const auto m = build_rate_matrix(sc, 0.0);
  EvolutionOptions options;
  options.leak_warning_threshold = 0.01;
  const auto r = evolve(m, PopulationState::motional_ground(sc.grid), 5e-3, options);
  CHECK(r.state.leaked() > 0.01);
  CHECK(r.leak_warning);
}

TEST_CASE("an excited start costs about one extra recoil") {
  const auto sc = small(preset("mg24_ca40").scenario, 10);
  const RateModel model(sc);
  const auto m = model.build(0.0);
  const auto g = evolve(m, PopulationState::motional_ground(sc.grid, InternalState::ground), 1e-3).state;
  const auto e = evolve(m, PopulationState::motional_ground(sc.grid, InternalState::excited), 1e-3).state;
  const double one_photon = 1.0 - model.emission()({0, 0}, {0, 0});
  const double extra = g.marginal(0, 0) - e.marginal(0, 0);
  CHECK(extra > 0.0);
  CHECK(extra < one_photon + 1e-3);
}
