#ifndef PGC_TEXT_FORMAT_HPP
#define PGC_TEXT_FORMAT_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "pgc/circuit.hpp"
#include "pgc/kernel.hpp"
#include "pgc/mass_circuit.hpp"
#include "pgc/spanning_tree.hpp"

// Line-oriented text formats. Blank lines and lines starting with '#' are
// ignored. Node ids are 0-based line positions among node lines; variable
// and vertex indices are 1-based. Reals are written in shortest round-trip
// form, so write-then-read reproduces every double.
//
//   pgc <num_vars> <num_nodes>      pmc <num_vars> <num_nodes>
//   v <var>                         x <var>
//   k <value>                       nx <var>
//   s <child>:<weight> ...          s <child>:<weight> ...
//   p <child> ...                   p <child> ...
//
//   kernel <lensemble|marginal|nonsymmetric> <n>, then n rows of n reals
//   graph <num_vertices> <num_edges>, then one "u v weight" line per edge

namespace pgc {

std::shared_ptr<const NodeCircuit> read_pgc(std::istream& in);
void write_pgc(std::ostream& out, const NodeCircuit& c);

MassCircuit read_pmc(std::istream& in);
void write_pmc(std::ostream& out, const MassCircuit& pc);

Kernel read_kernel(std::istream& in);
void write_kernel(std::ostream& out, const Kernel& k);

WeightedGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const WeightedGraph& g);

/// First token of the first non-comment line ("pgc", "pmc", ...).
std::string peek_format(const std::filesystem::path& path);

std::shared_ptr<const NodeCircuit> load_pgc(const std::filesystem::path& path);
MassCircuit load_pmc(const std::filesystem::path& path);
Kernel load_kernel(const std::filesystem::path& path);
WeightedGraph load_graph(const std::filesystem::path& path);

/// Reads a real with from_chars semantics; throws ParseError on junk.
double parse_real(const std::string& token, std::size_t line);
std::size_t parse_index(const std::string& token, std::size_t line);

/// Shortest decimal form that reads back to the same double.
std::string format_real(double v);

}  // namespace pgc

#endif  // PGC_TEXT_FORMAT_HPP
