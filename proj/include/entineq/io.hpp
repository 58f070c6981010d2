#pragma once

// JSON documents: datum and distribution inputs, sigma files, and the
// report document. Parse errors carry the JSON path of the offending field.

#include "entineq/datum.hpp"
#include "entineq/entropy.hpp"
#include "entineq/extremal.hpp"
#include "entineq/gaussopt.hpp"
#include "entineq/mixture.hpp"
#include "entineq/structure.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace entineq::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolName = "entineq";
inline constexpr const char* kToolVersion = "1.0.0";

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error((path.empty() ? std::string("$") : path) + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string sha256_hex(std::string_view bytes);

json parse_json(std::string_view text);

/// Shape-checked datum. Exponent signs and map ranks are left to validate().
Datum datum_from_json(const json& doc);
json datum_to_json(const Datum& datum);

ProductDistribution distribution_from_json(const json& doc);
json distribution_to_json(const ProductDistribution& dist);

/// Either {"schema_version": "1", "sigma": [[...]]} or a bare N x N array.
SymMat sigma_from_json(const json& doc, Index n);

json matrix_to_json(const Mat& m);
json subspace_to_json(const Subspace& s);
json product_subspace_to_json(const ProductSubspace& t);
json block_pd_to_json(const BlockPd& k);
json dimension_check_to_json(const DimensionCheck& check);
json geometric_check_to_json(const GeometricCheck& check);
json solve_to_json(const SolveResult& solve);
json best_constant_to_json(const BestConstant& bc);
json structure_to_json(const StructureReport& report);
json target_check_to_json(const TargetDecompositionCheck& check);
json deficit_to_json(const DeficitEstimate& d);
json extremal_to_json(const ExtremalCheck& check);

/// Finite doubles as numbers, non-finite ones as strings ("inf", "-inf", "nan").
json number(double x);

}  // namespace entineq::io
