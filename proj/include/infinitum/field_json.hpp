#pragma once

#include "json.hpp"

#include "infinitum/fields.hpp"

namespace infinitum {

using Json = nlohmann::json;

// Malformed documents raise MalformedInput; semantic problems (overlapping
// regions, discontinuity, ...) keep the code of the field constructor.
VectorField field_from_json(const Json& doc);
Json field_to_json(const VectorField& field);

LureForm lure_from_json(const Json& doc);
Json lure_to_json(const LureForm& lure);

Json vector_to_json(const Vector& v);
Json matrix_to_json(const Matrix& m);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

}  // namespace infinitum
