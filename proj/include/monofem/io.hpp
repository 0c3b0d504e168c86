#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "monofem/coeff.hpp"
#include "monofem/forward.hpp"
#include "monofem/mesh.hpp"
#include "monofem/ndmap.hpp"

namespace monofem::io {

using json = nlohmann::ordered_json;

// All floating-point output is rounded to 12 significant digits so reruns
// with the same configuration are byte-identical.
std::string format_double(double v);
double round12(double v);
json rounded(double v);

json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const json& j);
void write_mesh_json(const std::filesystem::path& path, const Mesh& mesh);
Mesh read_mesh_json(const std::filesystem::path& path);

// One "index,flag" line per element.
void write_mask_csv(const std::filesystem::path& path, const RegionMask& mask);
RegionMask read_mask_csv(const std::filesystem::path& path);

// P2 raster sampled on a regular grid over the mesh bounding box:
// 255 inside the mask, 128 elsewhere in the domain, 0 outside.
void write_mask_pgm(const std::filesystem::path& path, const Mesh& mesh,
                    const RegionMask& mask, int width = 200);

// Header "dim,<n>", then one "i,j,re,im" row per entry.
void write_operator_csv(const std::filesystem::path& path,
                        const Eigen::MatrixXcd& matrix);
Eigen::MatrixXcd read_operator_csv(const std::filesystem::path& path);
void write_nd_operator(const std::filesystem::path& matrix_path,
                       const std::filesystem::path& gram_path,
                       const NDOperator& op);
NDOperator read_nd_operator(const std::filesystem::path& matrix_path,
                            const std::filesystem::path& gram_path);

// "node,re,im" rows.
void write_solution_csv(const std::filesystem::path& path,
                        const FieldSolution& u);
// "edge,re,im" rows over the Gamma edges.
void write_current_csv(const std::filesystem::path& path,
                       const BoundaryCurrent& f);
BoundaryCurrent read_current_csv(const std::filesystem::path& path);

// Per-element coefficient dump: 8 reals per row (re/im per entry, row-major).
void write_coeff_csv(const std::filesystem::path& path, const MatrixField& a);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace monofem::io
