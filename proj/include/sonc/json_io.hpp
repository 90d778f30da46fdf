#pragma once

#include "sonc/certifier.hpp"
#include "sonc/generator.hpp"
#include "sonc/poly.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace sonc {

/// {"n": int, "A": [[int,...],...], "b": [float,...]}, A one row per term.
nlohmann::json polynomial_to_json(const SparsePolynomial& p);
nlohmann::json polynomial_to_json(const SparsePolynomial& p, const GenSpec& meta);
SparsePolynomial polynomial_from_json(const nlohmann::json& j);

/// JSON if the content starts with '{', the term grammar otherwise.
SparsePolynomial read_polynomial_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Reads the "meta" object written by the generator, if present.
std::optional<GenSpec> read_generator_meta(const nlohmann::json& j);

nlohmann::json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);

/// Summary of a bound() call in the published CLI schema.
nlohmann::json bound_result_to_json(const BoundResult& r);

}  // namespace sonc
