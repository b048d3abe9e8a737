#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"
#include "palm_forge/errors.hpp"
#include "palm_forge/palm_engine.hpp"

using namespace palm_forge;

namespace {

const GroupDomain kReal = GroupDomain::real_line();

std::vector<double> first_gaps(const SampleBatch& batch) {
  std::vector<double> out;
  for (const BatchItem& item : batch.items()) out.push_back(neighbors_of_zero(item.config).next);
  return out;
}

}  // namespace

TEST(SampleBatch, Validation) {
  const Window w = Window::symmetric(kReal, 3);
  EXPECT_THROW(SampleBatch(BatchRole::PalmSide, {}), PreconditionError);
  EXPECT_THROW(SampleBatch(BatchRole::PalmSide, {{PointConfig::simple(w, {1}), 1.0}}), PreconditionError);
  EXPECT_THROW(SampleBatch(BatchRole::StationarySide, {{PointConfig::simple(w, {1}), -1.0}}),
               PreconditionError);
  EXPECT_NO_THROW(SampleBatch(BatchRole::StationarySide, {{PointConfig::simple(w, {1}), 1.0}}));
}

TEST(WeightFunction, SumsToOne) {
  const WeightFunction omega{2.0};
  EXPECT_EQ(omega(kReal, 1.9), 0.25);
  EXPECT_EQ(omega(kReal, 2.1), 0.0);
  const GroupDomain z = GroupDomain::integer_lattice();
  double sum = 0.0;
  for (int k = -5; k <= 5; ++k) sum += WeightFunction{2.5}(z, k);
  EXPECT_DOUBLE_EQ(sum, 1.0);
}

TEST(LatticePalm, Examples) {
  const PointConfig c = sample_lattice_palm(Window::symmetric(kReal, 3));
  EXPECT_EQ(c.locations(), (std::vector<double>{-3, -2, -1, 0, 1, 2, 3}));
  EXPECT_EQ(voronoi_zero_volume(c), 1.0);
}

TEST(PoissonPalm, MeanCount) {
  const Window w = Window::symmetric(kReal, 10);
  const SampleBatch batch = sample_palm_batch(PalmSource::parse("poisson:lambda=2"), w, 10000, RandomStream(1));
  std::vector<double> counts;
  for (const BatchItem& item : batch.items()) {
    ASSERT_TRUE(item.config.has_atom_at(0.0));
    ASSERT_EQ(item.weight, 2.0);
    counts.push_back(double(item.config.size()));
  }
  const MeanEstimate m = mean_estimate(counts);
  EXPECT_NEAR(m.value, 41.0, 3 * m.se);
}

TEST(RenewalPalm, DeterministicGapIsTheLattice) {
  RandomStream rng(1);
  const Window w = Window::symmetric(kReal, 5);
  const BatchItem item = sample_renewal_palm(GapDistribution::parse("fixed:gap=1"), w, rng);
  EXPECT_EQ(item.config, sample_lattice_palm(w));
  EXPECT_EQ(item.weight, 1.0);
}

TEST(RenewalPalm, GammaGapMean) {
  const SampleBatch batch = sample_palm_batch(PalmSource::parse("renewal:gamma:shape=2,scale=0.5"),
                                              Window::symmetric(kReal, 10), 10000, RandomStream(2));
  const MeanEstimate m = mean_estimate(first_gaps(batch));
  EXPECT_NEAR(m.value, 1.0, 3 * m.se);
}

TEST(RenewalPalm, ExponentialGapsMatchPoisson) {
  const Window w = Window::symmetric(kReal, 10);
  const auto a = first_gaps(sample_palm_batch(PalmSource::parse("renewal:exp:rate=2"), w, 5000, RandomStream(3)));
  const auto b = first_gaps(sample_palm_batch(PalmSource::parse("poisson:lambda=2"), w, 5000, RandomStream(4)));
  const std::vector<double> ones(5000, 1.0);
  EXPECT_GT(weighted_ks_two_sample(a, ones, b, ones).p_value, 0.01);
}

TEST(PerturbPalm, ZeroFieldAndMass) {
  const Window w = Window::symmetric(kReal, 10);
  const SampleBatch batch = sample_palm_batch(PalmSource::parse("poisson:lambda=2"), w, 200, RandomStream(5));
  const SampleBatch same = perturb_palm(batch, IncrementSampler::parse("zero"), RandomStream(5));
  for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(same.items()[i].config, batch.items()[i].config);

  const SampleBatch moved = perturb_palm(batch, IncrementSampler::parse("brownian:sigma=0.5"), RandomStream(6));
  EXPECT_EQ(moved.total_weight(), batch.total_weight());
  for (const BatchItem& item : moved.items()) {
    EXPECT_TRUE(item.config.has_atom_at(0.0));
    EXPECT_EQ(item.config.total_weight(), double(item.config.size()));
  }
}

TEST(PerturbPalm, LatticeBecomesNPlusBn) {
  const Window w = Window::symmetric(kReal, 5);
  const SampleBatch lattice(BatchRole::PalmSide, {{sample_lattice_palm(w), 1.0}});
  const IncrementSampler bm = IncrementSampler::parse("brownian:sigma=0.3");
  const RandomStream base(7);
  const SampleBatch out = perturb_palm(lattice, bm, base);
  RandomStream rng = base.lane(lanes::kField).for_item(0);
  const std::vector<double> l = sample_lattice_palm(w).locations();
  const DisplacementTable d = sample_field(bm, kReal, l, rng);
  std::vector<Atom> expected;
  for (double n : l) expected.push_back({n + d.at(n), 1.0});
  EXPECT_EQ(out.items()[0].config.atoms().size(), expected.size());
  EXPECT_EQ(max_atom_discrepancy(out.items()[0].config,
                                 PointConfig::from_unsorted(out.items()[0].config.window(), expected)),
            0.0);
}

TEST(PerturbPalm, DomainMismatch) {
  const SampleBatch batch(BatchRole::PalmSide, {{sample_lattice_palm(Window::symmetric(kReal, 3)), 1.0}});
  EXPECT_THROW(perturb_palm(batch, IncrementSampler::parse("walk:poisson=1"), RandomStream(1)), DomainMismatch);
}

TEST(InvertRealline, LatticeMassIsExactlyOne) {
  const SampleBatch palm(BatchRole::PalmSide, std::vector<BatchItem>(100, {sample_lattice_palm(Window::symmetric(kReal, 6)), 1.0}));
  const SampleBatch stationary = invert_palm_realline(palm, RandomStream(8));
  EXPECT_EQ(stationary.role(), BatchRole::StationarySide);
  EXPECT_EQ(stationary.total_weight(), 100.0);
  EXPECT_EQ(inversion_mass_estimate(palm).value, 1.0);
  for (const BatchItem& item : stationary.items()) {
    const double frac = item.config.atoms()[0].location - std::floor(item.config.atoms()[0].location);
    for (const Atom& a : item.config.atoms()) EXPECT_NEAR(a.location - std::floor(a.location), frac, 1e-12);
  }
}

TEST(InvertRealline, PoissonMass) {
  const SampleBatch palm = sample_palm_batch(PalmSource::parse("poisson:lambda=2"), Window::symmetric(kReal, 10), 10000, RandomStream(9));
  const MeanEstimate m = inversion_mass_estimate(palm);
  EXPECT_NEAR(m.value, 1.0, 3 * m.se);
  EXPECT_NEAR(invert_palm_realline(palm, RandomStream(9)).mass(), m.value, 1e-12);
}

TEST(InvertRealline, ShiftArithmetic) {
  const Window w = Window::symmetric(kReal, 2);
  const PointConfig c = PointConfig::simple(w, {-0.5, 0, 0.25});
  // Origin moved to t = 0.1 inside the cycle [0, 0.25).
  const PointConfig out = stationary_from_palm(c, 0.1);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_NEAR(out.atoms()[0].location, -0.6, 1e-15);
  EXPECT_NEAR(out.atoms()[1].location, -0.1, 1e-15);
  EXPECT_NEAR(out.atoms()[2].location, 0.15, 1e-15);
}

TEST(InvertRealline, NeedsAPositiveAtom) {
  const Window w = Window::symmetric(kReal, 2);
  const SampleBatch palm(BatchRole::PalmSide, {{PointConfig::simple(w, {-1, 0}), 1.0}});
  EXPECT_THROW(invert_palm_realline(palm, RandomStream(1)), InsufficientWindow);
}

TEST(InvertCompact, ClosedForms) {
  const GroupDomain z12 = GroupDomain::cyclic(12);
  std::vector<double> all;
  for (int k = 0; k < 12; ++k) all.push_back(k);
  const SampleBatch full(BatchRole::PalmSide, {{PointConfig::simple(Window::full(z12), all), 1.0}});
  EXPECT_EQ(invert_palm_compact(full, RandomStream(1)).mass.value, 1.0);
  const SampleBatch single(BatchRole::PalmSide, {{PointConfig::simple(Window::full(z12), {0}), 1.0}});
  EXPECT_EQ(invert_palm_compact(single, RandomStream(1)).mass.value, 12.0);
}

TEST(InvertCompact, FieldMassMultiplies) {
  const GroupDomain z12 = GroupDomain::cyclic(12);
  const Window w = Window::full(z12);
  std::vector<BatchItem> items;
  RandomStream rng(2);
  for (int i = 0; i < 10000; ++i) items.push_back(sample_bernoulli_palm(0.3, w, rng));
  const SampleBatch palm(BatchRole::PalmSide, std::move(items));
  const MeanEstimate base = invert_palm_compact(palm, RandomStream(3)).mass;
  EXPECT_NEAR(base.value, oracle::kBernoulliMassZ12, 3 * base.se);
  const SampleBatch doubled = perturb_palm(palm, IncrementSampler::parse("iid-difference,mass=2"), RandomStream(4));
  const MeanEstimate m2 = invert_palm_compact(doubled, RandomStream(3)).mass;
  EXPECT_NEAR(m2.value, 2 * oracle::kBernoulliMassZ12, 3 * m2.se);
  const SampleBatch negated = perturb_palm(palm, IncrementSampler::parse("negation,mass=2"), RandomStream(4));
  EXPECT_EQ(invert_palm_compact(negated, RandomStream(3)).mass.value, 2 * base.value);
}

TEST(PalmOfStationary, LatticeRoundTrip) {
  const Window w = Window::symmetric(kReal, 12);
  const SampleBatch palm(BatchRole::PalmSide, std::vector<BatchItem>(2000, {sample_lattice_palm(w), 1.0}));
  const SampleBatch stationary = invert_palm_realline(palm, RandomStream(10));
  const SampleBatch back = palm_of_stationary(stationary, WeightFunction{2.0});
  for (const BatchItem& item : back.items()) {
    ASSERT_TRUE(item.config.has_atom_at(0.0));
    for (const Atom& a : item.config.atoms()) ASSERT_NEAR(a.location, std::round(a.location), 1e-9);
  }
  // mass() is the per-input total weight, the intensity estimate.
  EXPECT_NEAR(back.mass(), 1.0, 1e-9);
  EXPECT_THROW(palm_of_stationary(stationary, WeightFunction{7.0}), BiasError);
}

TEST(PalmOfStationary, PoissonRoundTripKeepsTheGapLaw) {
  const Window w = Window::symmetric(kReal, 12);
  const SampleBatch palm = sample_palm_batch(PalmSource::parse("poisson:lambda=2"), w, 4000, RandomStream(11));
  const SampleBatch back = palm_of_stationary(invert_palm_realline(palm, RandomStream(12)), WeightFunction{1.0});
  std::vector<double> a = first_gaps(palm), b, wb;
  for (const BatchItem& item : back.items()) {
    b.push_back(neighbors_of_zero(item.config).next);
    wb.push_back(item.weight);
  }
  const std::vector<double> wa(a.size(), 1.0);
  EXPECT_GT(weighted_ks_two_sample(a, wa, b, wb).p_value, 0.01);
}

TEST(Voronoi, MassEstimates) {
  const SampleBatch lattice(BatchRole::PalmSide, std::vector<BatchItem>(10, {sample_lattice_palm(Window::symmetric(kReal, 3)), 1.0}));
  const MeanEstimate l = voronoi_mass_estimate(lattice);
  EXPECT_EQ(l.value, 1.0);
  EXPECT_EQ(l.se, 0.0);
  const SampleBatch poisson = sample_palm_batch(PalmSource::parse("poisson:lambda=2"), Window::symmetric(kReal, 10), 10000, RandomStream(13));
  const MeanEstimate p = voronoi_mass_estimate(poisson);
  EXPECT_NEAR(p.value, 1.0, 3 * p.se);
  std::vector<double> cells;
  for (const BatchItem& item : poisson.items()) cells.push_back(voronoi_zero_volume(item.config));
  const MeanEstimate raw = mean_estimate(cells);
  EXPECT_NEAR(raw.value, 0.5, 3 * raw.se);
}

TEST(HeavyTail, FiniteMeanControlConverges) {
  const std::vector<std::size_t> sizes{1000, 10000, 100000};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const DivergenceReport r = heavy_tail_divergence_demo(IncrementSampler::parse("walk:poisson=2"), sizes, seeds);
  for (const RunningMeanRow& row : r.rows) {
    if (row.n == 100000) EXPECT_NEAR(row.running_mean, 3.0, 3 * row.se);
  }
  EXPECT_FALSE(r.gate_met);
}

TEST(HeavyTail, ReportShape) {
  const std::vector<std::size_t> sizes{10, 100};
  const std::vector<std::uint64_t> seeds{1, 2};
  const DivergenceReport r = heavy_tail_divergence_demo(IncrementSampler::parse("heavy:alpha=0.8"), sizes, seeds);
  EXPECT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.growth.size(), 2u);
  EXPECT_EQ(r.medians.size(), 2u);
  for (const RunningMeanRow& row : r.rows) EXPECT_GE(row.running_mean, 2.0);
}
