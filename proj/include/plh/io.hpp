#pragma once

// File formats. Every float is written with 17 significant digits and
// infinities as the string "inf", so dumps are lossless and byte-stable.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plh/diffusion.hpp"
#include "plh/local_sheaf.hpp"
#include "plh/nn.hpp"
#include "plh/persistence.hpp"

namespace plh::io {

using Json = nlohmann::json;

std::string format_double(double x);
/// A JSON number, or "inf" / "-inf"; NaN is rejected.
Json number(double x);
double to_number(const Json& j);
/// Serialises with format_double for floats; indent < 0 gives one line.
std::string dump(const Json& j, int indent = 2);

/// `u,v,w` rows, 0-based ids. Blank lines and lines starting with '#' are
/// skipped, as is a leading header row without digits.
WeightedGraph read_edge_csv(std::istream& in);
/// Rows of d coordinates, d fixed by the first row.
std::vector<std::vector<double>> read_point_csv(std::istream& in);

/// [{vertices, value, index}, ...] in filtration order.
Json filtration_json(const Filtration& f);
/// `max_dim` defaults to the largest simplex dimension in the dump.
Filtration filtration_from_json(const Json& j, std::optional<int> max_dim = std::nullopt);

template <class S>
Json cocycle_json(const PersistentCocycle<S>& c);
template <class S>
Json diagram_json(const Diagram<S>& d);
/// k,birth,death rows of the diagram's classes.
template <class S>
void write_diagram_csv(std::ostream& os, const Diagram<S>& d);

template <class S>
Json stalk_json(const LocalStalk<S>& s);

/// {order, stalk_dims, blocks}; blocks without atoms are left out.
template <class S>
Json laplacian_json(int k, const std::vector<LocalStalk<S>>& stalks,
                    const std::vector<SheafLaplacianBlock<S>>& blocks);

/// Symmetric coordinate format, lower triangle.
void write_matrix_market(std::ostream& os, const DenseMatrix<double>& m);

/// {order, channels: [{vertex: {cocycle_index: value}}]} over the operator's coordinates.
Json features_json(const FeatureBundle& x, const AssembledLaplacian<double>& l);
/// Entries absent from the file are zero; entries outside the operator's
/// coordinates are an error.
FeatureBundle features_from_json(const Json& j, const AssembledLaplacian<double>& l);

/// step,energy rows.
void write_trace_csv(std::ostream& os, const std::vector<double>& energy);

/// One JSON header line {widths, activation, dtype, count} followed by
/// `count` little-endian float64 values.
void write_psi(std::ostream& os, const Mlp& psi);
Mlp read_psi(std::istream& in);

}  // namespace plh::io
