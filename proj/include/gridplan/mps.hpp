#pragma once

#include "gridplan/milp.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace gridplan {

enum class MpsFormat { fixed, free };

// Row and column names as they appear in an exported file. In fixed format a
// name longer than 8 characters, or one containing whitespace, becomes a
// 3-character prefix plus a 5-character base-36 hash; a collision bumps the
// hash salt. Free format keeps names unless they contain whitespace.
struct MpsNames {
  std::string objective = "OBJ";
  std::vector<std::string> columns;
  std::vector<std::string> rows;
};

MpsNames mps_names(const Model& model, MpsFormat format = MpsFormat::fixed);

// Fixed format uses the classic field columns and 12 significant digits;
// free format uses 17 significant digits. Output is a pure function of the model.
std::string to_mps(const Model& model, MpsFormat format = MpsFormat::fixed);
void export_mps(const Model& model, const std::filesystem::path& path, MpsFormat format = MpsFormat::fixed);

// CPLEX LP text, offered as an alternative interchange format.
std::string to_lp(const Model& model);

// Maps exported names back to structured names.
nlohmann::json variable_map(const Model& model, MpsFormat format = MpsFormat::fixed);

}  // namespace gridplan
