#ifndef PROJGEOM_JSON_IO_HPP
#define PROJGEOM_JSON_IO_HPP

#include "projgeom/extension.hpp"
#include "projgeom/two_projections.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace projgeom {

using Json = nlohmann::ordered_json;

// Matrix wire format, used repo-wide:
//   {"rows": r, "cols": c, "data": [[re, im], ...]}  (row-major)

inline Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data.push_back({m(r, c).real(), m(r, c).imag()});
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("data"))
    throw ValidationError("matrix JSON: expected object with rows/cols/data");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1)
    throw ValidationError("matrix JSON: rows and cols must be positive");
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ValidationError("matrix JSON: data length " + std::to_string(data.size()) +
                          " does not match rows*cols = " +
                          std::to_string(rows * cols));
  Matrix m(rows, cols);
  Eigen::Index idx = 0;
  for (const auto& entry : data) {
    if (!entry.is_array() || entry.size() != 2)
      throw ValidationError("matrix JSON: each entry must be [re, im]");
    m(idx / cols, idx % cols) =
        Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    ++idx;
  }
  require_finite(m, "matrix JSON");
  return m;
}

inline Matrix matrix_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("malformed JSON in " + path + ": " + ex.what());
  }
  return matrix_from_json(j);
}

inline void matrix_to_file(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << matrix_to_json(m).dump(2) << "\n";
}

// TwoProjectionForm: {"unitary": <matrix>, "dims": [m, a, b, z],
//                     "generic": [[t, mult], ...]}

inline Json form_to_json(const TwoProjectionForm& form) {
  Json generic = Json::array();
  for (const auto& gp : form.generic_params)
    generic.push_back({gp.value, gp.multiplicity});
  return Json{{"unitary", matrix_to_json(form.unitary)},
              {"dims", {form.dim_meet, form.dim_p_only, form.dim_q_only,
                        form.dim_neither}},
              {"generic", std::move(generic)}};
}

inline TwoProjectionForm form_from_json(const Json& j) {
  TwoProjectionForm form;
  form.unitary = matrix_from_json(j.at("unitary"));
  const auto& dims = j.at("dims");
  if (!dims.is_array() || dims.size() != 4)
    throw ValidationError("form JSON: dims must be [meet, p_only, q_only, neither]");
  form.dim_meet = dims.at(0).get<int>();
  form.dim_p_only = dims.at(1).get<int>();
  form.dim_q_only = dims.at(2).get<int>();
  form.dim_neither = dims.at(3).get<int>();
  for (const auto& g : j.at("generic"))
    form.generic_params.push_back({g.at(0).get<double>(), g.at(1).get<int>()});
  return form;
}

// Extension system: {"blocks": [{"label", "dim", "kind"}...],
//                    "spectrum": [...], "busby": {label: point}}

struct SystemDescription {
  BlockSystem system;
  BusbyMap busby;
};

inline Json system_to_json(const SystemDescription& desc) {
  Json blocks = Json::array();
  for (const auto& b : desc.system.blocks)
    blocks.push_back({{"label", b.label},
                      {"dim", b.dim},
                      {"kind", b.kind == BlockKind::infinite ? "infinite" : "finite"}});
  Json busby = Json::object();
  for (const auto& [label, point] : desc.busby.assignment) busby[label] = point;
  return Json{{"blocks", std::move(blocks)},
              {"spectrum", desc.system.spectrum},
              {"busby", std::move(busby)}};
}

inline SystemDescription system_from_json(const Json& j) {
  SystemDescription desc;
  for (const auto& b : j.at("blocks")) {
    const std::string kind = b.at("kind").get<std::string>();
    if (kind != "infinite" && kind != "finite")
      throw ValidationError("system JSON: kind must be 'infinite' or 'finite'");
    desc.system.blocks.push_back({b.at("label").get<std::string>(),
                                  b.at("dim").get<Eigen::Index>(),
                                  kind == "infinite" ? BlockKind::infinite
                                                     : BlockKind::finite});
  }
  for (const auto& s : j.at("spectrum"))
    desc.system.spectrum.push_back(s.get<std::string>());
  if (j.contains("busby"))
    for (const auto& [label, point] : j.at("busby").items())
      desc.busby.assignment[label] = point.get<std::string>();
  desc.system.validate();
  desc.busby.validate(desc.system);
  return desc;
}

inline SystemDescription system_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("malformed JSON in " + path + ": " + ex.what());
  }
  return system_from_json(j);
}

// Extension element: {"blocks": {label: {"scalar": [re,im], "finite": <matrix>}},
//                     "abelian": {point: [re,im]}}

inline Json element_to_json(const BlockSystem& sys, const ExtensionElement& el) {
  validate_shape(sys, el);
  Json blocks = Json::object();
  for (std::size_t i = 0; i < sys.blocks.size(); ++i)
    blocks[sys.blocks[i].label] =
        Json{{"scalar", {el.blocks[i].scalar.real(), el.blocks[i].scalar.imag()}},
             {"finite", matrix_to_json(el.blocks[i].finite)}};
  Json abelian = Json::object();
  for (std::size_t i = 0; i < sys.spectrum.size(); ++i)
    abelian[sys.spectrum[i]] = {el.abelian[i].real(), el.abelian[i].imag()};
  return Json{{"blocks", std::move(blocks)}, {"abelian", std::move(abelian)}};
}

inline ExtensionElement element_from_json(const BlockSystem& sys, const Json& j) {
  ExtensionElement el;
  for (const auto& b : sys.blocks) {
    if (!j.at("blocks").contains(b.label))
      throw ValidationError("element JSON: missing block " + b.label);
    const auto& part = j.at("blocks").at(b.label);
    const auto& sc = part.at("scalar");
    el.blocks.push_back({Complex(sc.at(0).get<double>(), sc.at(1).get<double>()),
                         matrix_from_json(part.at("finite"))});
  }
  for (const auto& s : sys.spectrum) {
    if (!j.at("abelian").contains(s))
      throw ValidationError("element JSON: missing abelian point " + s);
    const auto& v = j.at("abelian").at(s);
    el.abelian.push_back(Complex(v.at(0).get<double>(), v.at(1).get<double>()));
  }
  validate_shape(sys, el);
  return el;
}

inline ExtensionElement element_from_file(const BlockSystem& sys,
                                          const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("malformed JSON in " + path + ": " + ex.what());
  }
  return element_from_json(sys, j);
}

}  // namespace projgeom

#endif  // PROJGEOM_JSON_IO_HPP
