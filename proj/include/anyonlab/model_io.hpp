#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "anyonlab/model.hpp"

namespace al {

using Json = nlohmann::ordered_json;

// Complex numbers travel as [re, im] pairs of doubles.
Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j, const std::string& where);

// Parses JSON text; syntax errors are reported as "source:line:column: message".
Json parse_json_text(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);
// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

Json model_to_json(const AnyonModel& model);
AnyonModel model_from_json(const Json& doc, const std::string& source = "<model>");

// Canonical text: two-space indentation, shortest round-trip doubles, trailing newline.
std::string export_model(const AnyonModel& model);
AnyonModel import_model_text(const std::string& text, const std::string& source = "<model>");
AnyonModel load_model_file(const std::string& path);

// A built-in model name such as "ising" or "hierarchy(2,5)", or a path to a model file.
AnyonModel resolve_model(const std::string& reference);

}  // namespace al
