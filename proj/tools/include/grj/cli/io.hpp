#pragma once

#include "json.hpp"
#include <string>
#include <vector>

#include "grj/cointegration.hpp"
#include "grj/laurent.hpp"
#include "grj/models.hpp"
#include "grj/simkit.hpp"

namespace grj::cli {

using Json = nlohmann::ordered_json;

/// {"rows": r, "cols": c, "entries": [[re, im], ...]} in row-major order.
Json matrix_to_json(const OperatorMatrix& m);
OperatorMatrix matrix_from_json(const Json& j);
Json real_matrix_to_json(const RealMatrix& m);
/// {"ambient": n, "basis": <matrix>}
Json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j, const Tolerance& tol);

/// A finite double, or null.
Json number(double v);

struct ModelFile {
  std::string id;
  ArPencil ar;
  OperatorMatrix cov;  // identity when the file has none
};

/// {"p": ..., "dim": ..., "norm": "one|two|sup", "coeffs": [<matrix>, ...]}, with
/// optional "cov" and "id". Unknown keys are rejected.
Json model_to_json(const ModelFile& m);
ModelFile model_from_json(const Json& j);

/// {"coeffs": [<matrix>, ...], "cov": <matrix>}
Json ma_to_json(const MaRepresentation& ma);
MaRepresentation ma_from_json(const Json& j, const Tolerance& tol);

Json spectrum_to_json(const SpectrumReport& s);
Json contour_to_json(const ContourInfo& c);
Json pole_order_to_json(const PoleOrder& p);
Json expansion_to_json(const LaurentExpansion& ex);
Json sweep_to_json(const SweepResult& s);
Json i1_to_json(const I1Report& r);
Json i2_to_json(const I2Report& r);
Json cointegration_to_json(const CointegrationReport& r);
Json beveridge_nelson_to_json(const BeveridgeNelson& bn);
Json check_to_json(const RepresentationCheck& c);
Json slope_to_json(const SlopeResult& s);
Json probe_to_json(const PolynomialProbe& p);
Json cointegration_probe_to_json(const CointegrationProbe& p);

/// Matrices of a JSON list, in order.
std::vector<OperatorMatrix> matrices_from_json(const Json& list);

/// Header t,coord_0,...,coord_{n-1}; rows t = 1..T; shortest round-trip numbers.
std::string path_to_csv(const SamplePath& path);
/// States of a CSV written by path_to_csv, row t - 1 = X_t.
RealMatrix states_from_csv(const std::string& text);

std::string format_double(double v);
std::string dump(const Json& j);
std::string read_text(const std::string& path);
/// "-" writes to stdout.
void write_text(const std::string& path, const std::string& text);

}  // namespace grj::cli
