#include "relsynth/report.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

struct RunWalker {
  const Manager& mgr;
  std::vector<VarId> vars;  // current-state bits, ascending = index order
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;

  void emit(std::uint64_t first, std::uint64_t count) {
    if (!runs.empty() && runs.back().first + runs.back().second == first) {
      runs.back().second += count;
    } else {
      runs.emplace_back(first, count);
    }
  }

  // Visits assignments in increasing index order.
  void walk(NodeId n, std::size_t level, std::uint64_t prefix) {
    if (n == Manager::kFalse) return;
    const std::size_t rest = vars.size() - level;
    if (n == Manager::kTrue) {
      emit(prefix << rest, std::uint64_t{1} << rest);
      return;
    }
    VarId v = mgr.node_var(n);
    if (v == vars[level]) {
      walk(mgr.node_lo(n), level + 1, prefix << 1);
      walk(mgr.node_hi(n), level + 1, (prefix << 1) | 1);
    } else if (v > vars[level]) {
      walk(n, level + 1, prefix << 1);
      walk(n, level + 1, (prefix << 1) | 1);
    } else {
      throw SignatureError("state dump: predicate depends on a non-state variable");
    }
  }
};

}  // namespace

std::vector<std::pair<std::uint64_t, std::uint64_t>> state_runs(const SymbolicSpace& space, const Predicate& p) {
  VarSet state = space.state_vars();
  if (!space.manager().support(p).subset_of(state)) {
    throw SignatureError("state dump: predicate depends on a non-state variable");
  }
  if (state.size() > 63) throw ResourceLimitError("state dump: more than 63 state bits");
  // Index order matches variable order because dimensions are laid out one
  // after another, msb first.
  RunWalker w{space.manager(), state.ids(), {}};
  w.walk(p.node(), 0, 0);
  return std::move(w.runs);
}

void write_cell_dump(std::ostream& out, const SymbolicSpace& space, const Predicate& p) {
  auto runs = state_runs(space, p);
  out << "dims";
  for (std::size_t d = 0; d < space.num_states(); ++d) {
    out << ' ' << space.dim(d).name() << ' ' << (std::uint64_t{1} << space.cur(d).size());
  }
  out << "\nruns " << runs.size() << '\n';
  for (const auto& [first, count] : runs) out << first << ' ' << count << '\n';
}

std::vector<std::filesystem::path> write_slices(const std::filesystem::path& dir, const SymbolicSpace& space,
                                                const Predicate& p) {
  const std::size_t n = space.num_states();
  std::vector<std::uint64_t> size(n);
  std::uint64_t total = 1;
  for (std::size_t d = 0; d < n; ++d) {
    size[d] = std::uint64_t{1} << space.cur(d).size();
    total *= size[d];
  }
  if (total > (std::uint64_t{1} << 28)) throw ResourceLimitError("slices: state space too large to rasterize");
  const std::uint64_t w = size[0];
  const std::uint64_t h = n > 1 ? size[1] : 1;
  const std::uint64_t slices = n > 2 ? size[2] : 1;
  std::uint64_t inner = 1;  // projected dimensions beyond the third
  for (std::size_t d = 3; d < n; ++d) inner *= size[d];

  std::vector<std::uint8_t> img(w * h * slices, 0);
  for (const auto& [first, count] : state_runs(space, p)) {
    for (std::uint64_t idx = first; idx < first + count; ++idx) {
      std::uint64_t rest = idx / inner;
      std::uint64_t s = rest % slices;
      rest /= slices;
      std::uint64_t y = rest % h;
      std::uint64_t x = rest / h;
      img[(s * h + y) * w + x] = 255;
    }
  }

  std::filesystem::create_directories(dir);
  const std::string stem = n > 2 ? space.dim(2).name() : "slice";
  const int digits = static_cast<int>(std::to_string(slices - 1).size());
  std::vector<std::filesystem::path> files;
  for (std::uint64_t s = 0; s < slices; ++s) {
    std::ostringstream name;
    name << stem << '_' << std::setw(digits) << std::setfill('0') << s << ".pgm";
    std::filesystem::path path = dir / name.str();
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "P2\n" << w << ' ' << h << "\n255\n";
    for (std::uint64_t row = 0; row < h; ++row) {
      std::uint64_t y = h - 1 - row;
      for (std::uint64_t x = 0; x < w; ++x) out << (x ? " " : "") << int{img[(s * h + y) * w + x]};
      out << '\n';
    }
    files.push_back(path);
  }
  return files;
}

}  // namespace relsynth
