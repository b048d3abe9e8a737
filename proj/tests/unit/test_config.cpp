#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"
#include "palm_forge/config.hpp"
#include "palm_forge/errors.hpp"
#include "palm_forge/increments.hpp"

using namespace palm_forge;

namespace {

const GroupDomain kReal = GroupDomain::real_line();
const GroupDomain kInt = GroupDomain::integer_lattice();

std::vector<double> locs(const PointConfig& c) { return c.locations(); }

DisplacementTable table(GroupDomain g, std::vector<std::pair<double, double>> entries) {
  std::vector<DisplacementTable::Entry> out;
  for (auto [x, b] : entries) out.push_back({x, b});
  return DisplacementTable(g, std::move(out));
}

}  // namespace

TEST(PointConfig, ValidatesInvariants) {
  const Window w = Window::symmetric(kReal, 5);
  EXPECT_THROW(PointConfig(w, {{1, 1}, {0, 1}}), PreconditionError);
  EXPECT_THROW(PointConfig(w, {{0, 1}, {0, 1}}), PreconditionError);
  EXPECT_THROW(PointConfig(w, {{0, 0}}), PreconditionError);
  EXPECT_THROW(PointConfig(w, {{6, 1}}), PreconditionError);
  const PointConfig merged = PointConfig::from_unsorted(w, {{1, 1}, {0, 2}, {1, 0.5}});
  EXPECT_EQ(merged.atoms().size(), 2u);
  EXPECT_EQ(merged.weight_at(1), 1.5);
  EXPECT_FALSE(merged.is_simple());
  EXPECT_TRUE(PointConfig::simple(w, {-1, 0, 2}).is_simple());
}

TEST(Translate, Examples) {
  const Window w = Window::symmetric(kReal, 5);
  const PointConfig c = PointConfig::simple(w, {0, 1});
  EXPECT_EQ(translate(c, 0.0), c);
  EXPECT_EQ(locs(translate(c, 1.0)), (std::vector<double>{-1, 0}));

  const GroupDomain z4 = GroupDomain::cyclic(4);
  const PointConfig d = PointConfig::simple(Window::full(z4), {0, 1});
  const PointConfig shifted = translate(d, 1.0);
  EXPECT_EQ(locs(shifted), (std::vector<double>{0, 3}));
  EXPECT_EQ(shifted.window(), d.window());
}

TEST(Translate, CompositionLaw) {
  const Window w = Window::symmetric(kInt, 10);
  const PointConfig c = PointConfig::simple(w, {-4, -1, 0, 3, 7});
  EXPECT_EQ(translate(translate(c, 2), -5), translate(c, -3));
  const PointConfig z = PointConfig::simple(Window::full(GroupDomain::cyclic(5)), {0, 2, 3});
  EXPECT_EQ(translate(translate(z, 4), 3), translate(z, 2));
}

TEST(Perturb, NegationCollapsesTheCyclicGroup) {
  const GroupDomain z4 = GroupDomain::cyclic(4);
  const PointConfig c = PointConfig::simple(Window::full(z4), {0, 1, 2, 3});
  const DisplacementTable d = table(z4, {{0, 0}, {1, 3}, {2, 2}, {3, 1}});
  const PointConfig out = perturb(c, d);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.atoms()[0], (Atom{0, 4}));
  EXPECT_EQ(collision_count(c, d), 12u);
}

TEST(Perturb, Z12NegationFixture) {
  const GroupDomain z12 = GroupDomain::cyclic(12);
  std::vector<double> all;
  for (int k = 0; k < 12; ++k) all.push_back(k);
  const PointConfig c = PointConfig::simple(Window::full(z12), all);
  RandomStream rng(1);
  const DisplacementTable d = sample_field(IncrementSampler(IncrementSampler::NegationField{}), z12, all, rng);
  const PointConfig out = perturb(c, d);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.atoms()[0], (Atom{0, 12}));
  EXPECT_EQ(collision_count(c, d), oracle::kZ12NegationCollisions);
}

TEST(Perturb, ZeroTableIsIdentity) {
  const PointConfig c = PointConfig::simple(Window::symmetric(kReal, 3), {-2.5, 0, 0.7});
  const std::vector<double> l = c.locations();
  const DisplacementTable zero = DisplacementTable::zero(kReal, l);
  EXPECT_EQ(perturb(c, zero), c);
  EXPECT_EQ(collision_count(c, zero), 0u);
}

TEST(Perturb, LatticePointwise) {
  const PointConfig c = PointConfig::simple(Window::symmetric(kInt, 1), {-1, 0, 1});
  const PointConfig out = perturb(c, table(kInt, {{-1, 2}, {0, 0}, {1, -3}}));
  EXPECT_EQ(locs(out), (std::vector<double>{-2, 0, 1}));
  EXPECT_EQ(out.total_weight(), 3.0);
  EXPECT_TRUE(out.window().contains(-2));
}

TEST(Perturb, MissingDisplacement) {
  const PointConfig c = PointConfig::simple(Window::symmetric(kInt, 2), {0, 1});
  EXPECT_THROW(perturb(c, table(kInt, {{0, 0}})), IncompleteTable);
}

TEST(Perturb, RealLineMergeTolerance) {
  const PointConfig c = PointConfig::simple(Window::symmetric(kReal, 3), {0, 1});
  const PointConfig out = perturb(c, table(kReal, {{0, 0}, {1, -1 + 5e-10}}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.atoms()[0].weight, 2.0);
  EXPECT_EQ(perturb(c, table(kReal, {{0, 0}, {1, -1 + 1e-8}})).size(), 2u);
}

TEST(CollisionCount, Examples) {
  const PointConfig c = PointConfig::simple(Window::symmetric(kInt, 2), {0, 1});
  // Tables must satisfy B_0 = 0, so {0 -> 1, 1 -> 0} is not constructible;
  // {0 -> 0, 1 -> -1} sends both atoms to one site instead.
  EXPECT_THROW(table(kInt, {{0, 1}, {1, 0}}), PreconditionError);
  EXPECT_EQ(collision_count(c, table(kInt, {{0, 0}, {1, -1}})), 2u);
  const PointConfig heavy = PointConfig(Window::symmetric(kInt, 2), {{0, 2}});
  EXPECT_THROW((void)collision_count(heavy, table(kInt, {{0, 0}})), PreconditionError);
}

TEST(CollisionCount, ZeroImpliesSimpleImage) {
  RandomStream rng(2);
  const IncrementSampler walk(IncrementSampler::IidWalk{{StepDistribution::UniformInt{-1, 1}}});
  const Window w = Window::symmetric(kInt, 6);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> l;
    for (int k = -6; k <= 6; ++k) l.push_back(k);
    const PointConfig c = PointConfig::simple(w, l);
    const DisplacementTable d = sample_field(walk, kInt, l, rng);
    const PointConfig out = perturb(c, d);
    EXPECT_EQ(collision_count(c, d) == 0, out.is_simple());
    EXPECT_EQ(out.total_weight(), c.total_weight());
  }
}

TEST(NeighborsOfZero, Examples) {
  std::vector<double> lattice;
  for (int k = -5; k <= 5; ++k) lattice.push_back(k);
  const ZeroNeighbors a = neighbors_of_zero(PointConfig::simple(Window::symmetric(kInt, 5), lattice));
  EXPECT_EQ(a.before, -1);
  EXPECT_EQ(a.at_or_after, 0);
  EXPECT_EQ(a.next, 1);

  const Window w = Window::symmetric(kReal, 6);
  const ZeroNeighbors b = neighbors_of_zero(PointConfig::simple(w, {-0.4, 0.0, 0.7}));
  EXPECT_EQ(b.before, -0.4);
  EXPECT_EQ(b.at_or_after, 0.0);
  EXPECT_EQ(b.next, 0.7);

  const ZeroNeighbors c = neighbors_of_zero(PointConfig::simple(w, {-2, 3, 5}));
  EXPECT_EQ(c.before, -2);
  EXPECT_EQ(c.at_or_after, 3);
  EXPECT_EQ(c.next, 5);

  EXPECT_THROW(neighbors_of_zero(PointConfig::simple(w, {0, 1})), InsufficientWindow);
}

TEST(Voronoi, ZeroCellLength) {
  const Window w = Window::symmetric(kReal, 3);
  EXPECT_EQ(voronoi_zero_volume(PointConfig::simple(w, {-1, 0, 1})), 1.0);
  EXPECT_NEAR(voronoi_zero_volume(PointConfig::simple(w, {-0.4, 0, 0.8})), 0.6, 1e-15);
  EXPECT_THROW(voronoi_zero_volume(PointConfig::simple(w, {-0.4, 0.8})), PreconditionError);
}

TEST(MaxAtomDiscrepancy, CountsAndWeights) {
  const Window w = Window::symmetric(kReal, 3);
  const PointConfig a = PointConfig::simple(w, {0, 1});
  EXPECT_EQ(max_atom_discrepancy(a, a), 0.0);
  EXPECT_NEAR(max_atom_discrepancy(a, PointConfig::simple(w, {0, 1 + 1e-13})), 1e-13, 1e-16);
  EXPECT_TRUE(std::isinf(max_atom_discrepancy(a, PointConfig::simple(w, {0}))));
  EXPECT_TRUE(std::isinf(max_atom_discrepancy(a, PointConfig(w, {{0, 1}, {1, 2}}))));
}
