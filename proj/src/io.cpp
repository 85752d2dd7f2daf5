#include "relsynth/io.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "relsynth/errors.hpp"

namespace relsynth {

namespace {

constexpr const char* kMagic = "relsynth-interface 1";

void write_names(std::ostream& out, const char* tag, const Manager& mgr, const VarSet& vs) {
  out << tag;
  for (VarId v : vs) out << ' ' << mgr.name(v);
  out << '\n';
}

VarSet read_names(const std::string& line, const char* tag, const Manager& mgr) {
  std::string prefix(tag);
  if (line.rfind(prefix, 0) != 0) throw ParseError(std::string("interface: expected '") + tag + "'");
  std::istringstream ls(line.substr(prefix.size()));
  std::vector<VarId> ids;
  std::string name;
  while (ls >> name) {
    auto v = mgr.find(name);
    if (!v) throw ParseError("interface: unknown variable " + name);
    ids.push_back(*v);
  }
  return VarSet(std::move(ids));
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used != s.size()) throw ParseError("interface: bad number " + s);
    return x;
  } catch (const std::logic_error&) {
    throw ParseError("interface: bad number " + s);
  }
}

}  // namespace

void save_interface(std::ostream& out, const Interface& f, const std::vector<Dimension>& dims,
                    const std::map<std::string, std::string>& meta) {
  const Manager& mgr = f.manager();
  out << kMagic << '\n' << std::setprecision(17);
  for (const Dimension& d : dims) {
    out << "dim " << d.name();
    if (d.is_continuous()) {
      out << " continuous " << d.lo() << ' ' << d.hi() << ' ' << (d.periodic() ? 1 : 0) << ' ' << d.bits();
    } else {
      out << " discrete";
      for (double v : d.values()) out << ' ' << v;
    }
    out << '\n';
  }
  write_names(out, "inputs:", mgr, f.inputs());
  write_names(out, "outputs:", mgr, f.outputs());
  for (const auto& [k, v] : meta) {
    std::string flat = v;
    for (char& c : flat)
      if (c == '\n') c = ' ';
    out << "meta " << k << ' ' << flat << '\n';
  }
  mgr.write(out, f.pred());
}

Interface load_interface(std::istream& in, Manager& mgr, InterfaceFile* header) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ParseError("interface: missing header line");
  InterfaceFile hdr;
  std::optional<VarSet> inputs, outputs;
  while (std::getline(in, line)) {
    if (line.rfind("vars:", 0) == 0) break;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "dim") {
      std::string name, kind;
      ls >> name >> kind;
      std::vector<std::string> rest;
      for (std::string tok; ls >> tok;) rest.push_back(tok);
      if (kind == "continuous") {
        if (rest.size() != 4) throw ParseError("interface: malformed continuous dim line");
        hdr.dims.push_back(Dimension::continuous(name, parse_double(rest[0]), parse_double(rest[1]),
                                                 std::stoi(rest[3]), rest[2] == "1"));
      } else if (kind == "discrete") {
        std::vector<double> values;
        for (const auto& tok : rest) values.push_back(parse_double(tok));
        hdr.dims.push_back(Dimension::discrete(name, values));
      } else {
        throw ParseError("interface: unknown dimension kind " + kind);
      }
    } else if (tag == "inputs:") {
      inputs = read_names(line, "inputs:", mgr);
    } else if (tag == "outputs:") {
      outputs = read_names(line, "outputs:", mgr);
    } else if (tag == "meta") {
      std::string key, value;
      ls >> key;
      std::getline(ls >> std::ws, value);
      hdr.meta[key] = value;
    } else {
      throw ParseError("interface: unexpected line: " + line);
    }
  }
  if (!inputs || !outputs) throw ParseError("interface: missing inputs/outputs lines");
  if (line.rfind("vars:", 0) != 0) throw ParseError("interface: truncated input (no predicate)");
  // Hand the predicate section (starting at the vars: line) to the manager.
  std::stringstream rest;
  rest << line << '\n' << in.rdbuf();
  Predicate p = mgr.read(rest);
  if (header) *header = std::move(hdr);
  return Interface(std::move(*inputs), std::move(*outputs), std::move(p));
}

void check_dimensions(const InterfaceFile& header, const std::vector<Dimension>& dims) {
  if (header.dims.size() != dims.size()) throw ConfigError("interface file: dimension count mismatch");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const Dimension& a = header.dims[i];
    const Dimension& b = dims[i];
    bool same = a.name() == b.name() && a.kind() == b.kind() && a.bits() == b.bits();
    if (same && a.is_continuous()) same = a.lo() == b.lo() && a.hi() == b.hi() && a.periodic() == b.periodic();
    if (same && !a.is_continuous()) same = a.values() == b.values();
    if (!same) throw ConfigError("interface file: dimension mismatch on " + b.name());
  }
}

void save_interface_file(const std::string& path, const Interface& f, const std::vector<Dimension>& dims,
                         const std::map<std::string, std::string>& meta) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save_interface(out, f, dims, meta);
}

Interface load_interface_file(const std::string& path, Manager& mgr, InterfaceFile* header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return load_interface(in, mgr, header);
}

}  // namespace relsynth
