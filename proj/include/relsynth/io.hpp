#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "relsynth/interface.hpp"
#include "relsynth/spaces.hpp"

namespace relsynth {

/// Contents of an interface file besides the interface itself.
struct InterfaceFile {
  std::vector<Dimension> dims;
  std::map<std::string, std::string> meta;
};

/// Text format:
///   relsynth-interface 1
///   dim <name> continuous <lo> <hi> <periodic 0|1> <bits>
///   dim <name> discrete <v1> <v2> ...
///   inputs: <names>
///   outputs: <names>
///   meta <key> <value>
///   <predicate text form, see Manager::write>
void save_interface(std::ostream& out, const Interface& f, const std::vector<Dimension>& dims,
                    const std::map<std::string, std::string>& meta = {});

/// Loads into `mgr`. Throws ParseError on malformed or truncated input and
/// on variables the manager does not know.
Interface load_interface(std::istream& in, Manager& mgr, InterfaceFile* header = nullptr);

/// Throws ConfigError if the file's dimension table disagrees with `dims`
/// (names, kinds, ranges and bits must all match).
void check_dimensions(const InterfaceFile& header, const std::vector<Dimension>& dims);

void save_interface_file(const std::string& path, const Interface& f, const std::vector<Dimension>& dims,
                         const std::map<std::string, std::string>& meta = {});
Interface load_interface_file(const std::string& path, Manager& mgr, InterfaceFile* header = nullptr);

}  // namespace relsynth
