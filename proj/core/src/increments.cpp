#include "palm_forge/increments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "palm_forge/errors.hpp"

namespace palm_forge {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw PreconditionError("cannot parse " + std::string(what) + " from '" + std::string(text) +
                            "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  const double v = parse_double(text, what);
  if (std::trunc(v) != v) throw PreconditionError(std::string(what) + " must be an integer");
  return static_cast<std::int64_t>(v);
}

// "a=1,b=2" -> {a: "1", b: "2"}
std::map<std::string, std::string, std::less<>> parse_params(std::string_view text) {
  std::map<std::string, std::string, std::less<>> params;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw PreconditionError("expected key=value in field spec, got '" + std::string(item) + "'");
    }
    params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return params;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

void require_sorted_with_zero(std::span<const double> locations) {
  if (!std::is_sorted(locations.begin(), locations.end()) ||
      std::adjacent_find(locations.begin(), locations.end()) != locations.end()) {
    throw PreconditionError("field locations must be sorted and distinct");
  }
  if (!std::binary_search(locations.begin(), locations.end(), 0.0)) {
    throw PreconditionError("field locations must contain zero");
  }
}

// Lattice walk with i.i.d. increments B_x - B_{x-1}; `step` draws one
// increment. Walks outward from zero so a draw depends only on the span
// of the locations, not on their spacing.
template <class StepFn>
std::vector<DisplacementTable::Entry> lattice_walk(std::span<const double> locations,
                                                   StepFn&& step) {
  std::vector<DisplacementTable::Entry> entries(locations.size());
  const auto zero_at = static_cast<std::size_t>(
      std::lower_bound(locations.begin(), locations.end(), 0.0) - locations.begin());
  double position = 0.0;
  double value = 0.0;
  for (std::size_t i = zero_at; i < locations.size(); ++i) {
    while (position < locations[i]) {
      value += step();
      position += 1.0;
    }
    entries[i] = {locations[i], value};
  }
  position = 0.0;
  value = 0.0;
  for (std::size_t i = zero_at; i-- > 0;) {
    while (position > locations[i]) {
      value -= step();
      position -= 1.0;
    }
    entries[i] = {locations[i], value};
  }
  return entries;
}

}  // namespace

double StepDistribution::mean() const noexcept {
  return std::visit(Overloaded{[](const Constant& c) { return static_cast<double>(c.value); },
                               [](const UniformInt& u) { return 0.5 * double(u.lo + u.hi); },
                               [](const Poisson& p) { return p.mean; }},
                    law);
}

std::int64_t StepDistribution::draw(RandomStream& rng) const {
  return std::visit(
      Overloaded{[](const Constant& c) { return c.value; },
                 [&](const UniformInt& u) {
                   return std::uniform_int_distribution<std::int64_t>(u.lo, u.hi)(rng);
                 },
                 [&](const Poisson& p) {
                   return static_cast<std::int64_t>(std::poisson_distribution<long>(p.mean)(rng));
                 }},
      law);
}

std::string StepDistribution::name() const {
  return std::visit(
      Overloaded{[](const Constant& c) { return "constant=" + std::to_string(c.value); },
                 [](const UniformInt& u) {
                   return "uniform=" + std::to_string(u.lo) + ".." + std::to_string(u.hi);
                 },
                 [](const Poisson& p) { return "poisson=" + format_number(p.mean); }},
      law);
}

IncrementSampler::IncrementSampler(Kind kind, double mass) : kind_(std::move(kind)), mass_(mass) {
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) {
    throw PreconditionError("field mass must be positive and finite");
  }
  std::visit(Overloaded{[](const TwoSidedBrownian& b) {
                          if (!(b.sigma > 0.0)) throw PreconditionError("sigma must be positive");
                        },
                        [](const HeavyTailWalk& h) {
                          if (!(h.alpha > 0.0 && h.alpha <= 1.0)) {
                            throw PreconditionError("heavy-tail alpha must lie in (0, 1]");
                          }
                        },
                        [](const LinearDrift& d) {
                          if (!(std::abs(d.c) < 1.0)) {
                            throw PreconditionError("linear drift needs |c| < 1");
                          }
                        },
                        [](const IidWalk& w) {
                          if (const auto* u = std::get_if<StepDistribution::UniformInt>(&w.step.law);
                              u && u->lo > u->hi) {
                            throw PreconditionError("uniform step range is empty");
                          }
                          if (const auto* p = std::get_if<StepDistribution::Poisson>(&w.step.law);
                              p && !(p->mean > 0.0)) {
                            throw PreconditionError("Poisson step mean must be positive");
                          }
                        },
                        [](const auto&) {}},
             kind_);
}

IncrementSampler IncrementSampler::parse(std::string_view spec) {
  // "kind:params" or "kind,params" (the latter for parameterless kinds with a mass).
  const auto split = spec.find_first_of(":,");
  const auto head = spec.substr(0, split);
  auto params = parse_params(split == std::string_view::npos ? std::string_view{}
                                                             : spec.substr(split + 1));
  double mass = 1.0;
  if (auto it = params.find("mass"); it != params.end()) {
    mass = parse_double(it->second, "mass");
    params.erase(it);
  }
  auto take = [&](std::string_view key) -> std::string {
    auto it = params.find(key);
    if (it == params.end()) {
      throw PreconditionError("field '" + std::string(head) + "' needs parameter " +
                              std::string(key));
    }
    std::string v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&](Kind kind) {
    if (!params.empty()) {
      throw PreconditionError("unknown parameter '" + params.begin()->first + "' for field '" +
                              std::string(head) + "'");
    }
    return IncrementSampler(std::move(kind), mass);
  };

  if (head == "brownian") return finish(TwoSidedBrownian{parse_double(take("sigma"), "sigma")});
  if (head == "heavy") return finish(HeavyTailWalk{parse_double(take("alpha"), "alpha")});
  if (head == "drift") return finish(LinearDrift{parse_double(take("c"), "c")});
  if (head == "negation") return finish(NegationField{});
  if (head == "zero") return finish(ZeroField{});
  if (head == "iid-difference") return finish(IidDifference{});
  if (head == "walk") {
    if (params.contains("poisson")) {
      return finish(IidWalk{{StepDistribution::Poisson{parse_double(take("poisson"), "poisson")}}});
    }
    if (params.contains("constant")) {
      return finish(
          IidWalk{{StepDistribution::Constant{parse_int(take("constant"), "constant")}}});
    }
    if (params.contains("uniform")) {
      const std::string range = take("uniform");
      const auto dots = range.find("..");
      if (dots == std::string::npos) throw PreconditionError("uniform steps need lo..hi");
      return finish(IidWalk{{StepDistribution::UniformInt{
          parse_int(std::string_view(range).substr(0, dots), "lo"),
          parse_int(std::string_view(range).substr(dots + 2), "hi")}}});
    }
    throw PreconditionError("walk needs one of poisson=, constant=, uniform=");
  }
  throw PreconditionError("unknown field kind '" + std::string(head) + "'");
}

bool IncrementSampler::pointwise_non_atomic() const noexcept {
  return std::holds_alternative<TwoSidedBrownian>(kind_);
}

bool IncrementSampler::is_deterministic() const noexcept {
  return std::holds_alternative<NegationField>(kind_) || std::holds_alternative<ZeroField>(kind_) ||
         std::holds_alternative<LinearDrift>(kind_);
}

bool IncrementSampler::supports(const GroupDomain& domain) const noexcept {
  const GroupKind k = domain.kind();
  return std::visit(
      Overloaded{[&](const TwoSidedBrownian&) { return k == GroupKind::RealLine; },
                 [&](const LinearDrift&) { return k == GroupKind::RealLine; },
                 [&](const IidWalk&) { return k == GroupKind::IntegerLattice; },
                 [&](const HeavyTailWalk&) { return k == GroupKind::IntegerLattice; },
                 [&](const IidDifference&) { return k == GroupKind::CyclicGroup; },
                 [](const NegationField&) { return true; },
                 [](const ZeroField&) { return true; }},
      kind_);
}

std::string IncrementSampler::name() const {
  std::string base = std::visit(
      Overloaded{
          [](const TwoSidedBrownian& b) { return "brownian:sigma=" + format_number(b.sigma); },
          [](const IidWalk& w) { return "walk:" + w.step.name(); },
          [](const HeavyTailWalk& h) { return "heavy:alpha=" + format_number(h.alpha); },
          [](const IidDifference&) { return std::string("iid-difference"); },
          [](const NegationField&) { return std::string("negation"); },
          [](const ZeroField&) { return std::string("zero"); },
          [](const LinearDrift& d) { return "drift:c=" + format_number(d.c); }},
      kind_);
  if (mass_ != 1.0) base += (base.find(':') == std::string::npos ? ":" : ",") +
                            std::string("mass=") + format_number(mass_);
  return base;
}

DisplacementTable sample_field(const IncrementSampler& sampler, const GroupDomain& domain,
                               std::span<const double> locations, RandomStream& rng) {
  if (!sampler.supports(domain)) {
    throw DomainMismatch("field " + sampler.name() + " is not defined on " + domain.name());
  }
  require_sorted_with_zero(locations);
  for (double x : locations) domain.require_element(x);

  using Entry = DisplacementTable::Entry;
  std::vector<Entry> entries;
  auto closed_form = [&](auto&& f) {
    entries.reserve(locations.size());
    for (double x : locations) entries.push_back({x, f(x)});
  };

  std::visit(
      Overloaded{
          [&](const IncrementSampler::TwoSidedBrownian& b) {
            std::normal_distribution<double> gauss(0.0, 1.0);
            entries.resize(locations.size());
            const auto zero_at = static_cast<std::size_t>(
                std::lower_bound(locations.begin(), locations.end(), 0.0) - locations.begin());
            entries[zero_at] = {0.0, 0.0};
            for (std::size_t i = zero_at + 1; i < locations.size(); ++i) {
              const double gap = locations[i] - locations[i - 1];
              entries[i] = {locations[i],
                            entries[i - 1].displacement + b.sigma * std::sqrt(gap) * gauss(rng)};
            }
            for (std::size_t i = zero_at; i-- > 0;) {
              const double gap = locations[i + 1] - locations[i];
              entries[i] = {locations[i],
                            entries[i + 1].displacement + b.sigma * std::sqrt(gap) * gauss(rng)};
            }
          },
          [&](const IncrementSampler::IidWalk& w) {
            entries = lattice_walk(locations, [&] { return static_cast<double>(w.step.draw(rng)); });
          },
          [&](const IncrementSampler::HeavyTailWalk& h) {
            entries = lattice_walk(
                locations, [&] { return std::ceil(std::pow(rng.uniform_open(), -1.0 / h.alpha)); });
          },
          [&](const IncrementSampler::IidDifference&) {
            std::uniform_int_distribution<std::int64_t> mark(0, domain.order() - 1);
            const auto origin = static_cast<double>(mark(rng));
            closed_form([&](double x) {
              return x == 0.0 ? 0.0 : domain.subtract(static_cast<double>(mark(rng)), origin);
            });
          },
          [&](const IncrementSampler::NegationField&) {
            closed_form([&](double x) { return domain.negate(x); });
          },
          [&](const IncrementSampler::ZeroField&) { closed_form([](double) { return 0.0; }); },
          [&](const IncrementSampler::LinearDrift& d) {
            closed_form([&](double x) { return d.c * x; });
          }},
      sampler.kind());
  return DisplacementTable(domain, std::move(entries));
}

DisplacementTable shift_table(const DisplacementTable& table, double t) {
  const GroupDomain& g = table.domain();
  const double anchor = table.at(t);
  std::vector<DisplacementTable::Entry> entries;
  entries.reserve(table.size());
  for (const auto& e : table.entries()) {
    entries.push_back({g.subtract(e.location, t), g.subtract(e.displacement, anchor)});
  }
  return DisplacementTable(g, std::move(entries));
}

DisplacementTable shift_table(const DisplacementTable& table, double t,
                              std::span<const double> outputs) {
  const GroupDomain& g = table.domain();
  const double anchor = table.at(t);
  std::vector<DisplacementTable::Entry> entries;
  entries.reserve(outputs.size() + 1);
  bool has_zero = false;
  for (double s : outputs) {
    const double target = g.add(t, s);
    const auto value = table.find_near(target, 1e-12 * std::max(1.0, std::abs(target)));
    if (!value) {
      throw IncompleteTable("shift_table needs B at " + std::to_string(target));
    }
    entries.push_back({s, s == 0.0 ? 0.0 : g.subtract(*value, anchor)});
    has_zero = has_zero || s == 0.0;
  }
  if (!has_zero) entries.push_back({0.0, 0.0});
  return DisplacementTable(g, std::move(entries));
}

double sublinear_diagnostic(const IncrementSampler& sampler, const GroupDomain& domain,
                            double radius, int paths, RandomStream& rng) {
  if (domain.is_compact()) {
    throw PreconditionError("sub-linear growth is only meaningful on the real line or lattice");
  }
  if (!(radius > 0.0) || paths < 1) {
    throw PreconditionError("sublinear_diagnostic needs radius > 0 and paths >= 1");
  }
  constexpr int kGridPoints = 32;
  std::vector<double> grid;
  for (int k = 0; k <= kGridPoints; ++k) {
    double r = radius / 2.0 + (radius / 2.0) * k / kGridPoints;
    if (domain.is_discrete()) r = std::max(1.0, std::round(r));
    grid.push_back(r);
    grid.push_back(-r);
  }
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  for (int p = 0; p < paths; ++p) {
    const DisplacementTable table = sample_field(sampler, domain, grid, rng);
    double worst = 0.0;
    for (const auto& e : table.entries()) {
      if (e.location != 0.0) {
        worst = std::max(worst, std::abs(e.displacement) / std::abs(e.location));
      }
    }
    total += worst;
  }
  return total / paths;
}

void require_sublinear(const IncrementSampler& sampler, const GroupDomain& domain, double radius,
                       int paths, RandomStream& rng) {
  if (domain.is_compact()) return;
  const double value = sublinear_diagnostic(sampler, domain, radius, paths, rng);
  if (!(value < 1.0)) {
    std::ostringstream msg;
    msg << "field " << sampler.name() << " fails the sub-linear growth gate at radius " << radius
        << ": max |B_t|/|t| averages " << value << " >= 1";
    throw GateFailure(msg.str());
  }
}

}  // namespace palm_forge
