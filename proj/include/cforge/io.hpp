#pragma once
// Report emitters: versioned JSON objects for the solver and correspondence
// reports, DOT renderings of tree balls and quotient graphs, and a small
// structural validator for the shipped schema files. All numbers are exact —
// integers or coefficient strings, never floating point.

#include <string>
#include <vector>

#include <json.hpp>

#include "cforge/cocycles.hpp"
#include "cforge/correspondence.hpp"
#include "cforge/quotient.hpp"
#include "cforge/tree.hpp"

namespace cforge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaTag = "cocycle-forge/1";

inline Json json_report(const std::string& kind) {
  Json j;
  j["schema"] = kSchemaTag;
  j["kind"] = kind;
  return j;
}

// a machine-readable finding: something computed that contradicts a working
// convention, reported rather than silently absorbed
inline Json json_finding(const std::string& what, const std::string& message, Json details) {
  Json j = json_report("finding");
  j["finding"] = what;
  j["message"] = message;
  j["details"] = std::move(details);
  return j;
}

inline Json json_invariant_space(const InvariantSpace& S) {
  Json j = json_report("cocycle_basis");
  j["group"] = S.group_name;
  j["q"] = S.q;
  j["weight"] = S.weight;
  j["ring"] = solve_ring_name(S.ring);
  if (S.galois) j["galois_k"] = S.galois->k;
  j["twist"] = S.twist;
  j["depth"] = S.depth;
  j["extra_ray_levels"] = S.extra_ray_levels;
  j["cusp_vanishing"] = S.cusp_vanishing;
  j["rows_complete"] = S.rows_complete;
  j["dimension"] = S.dimension;
  j["unknown_pairs"] = S.unknown_pairs;
  if (S.ring == SolveRing::integers) {
    Json fs = Json::array();
    for (const mpz_class& d : S.invariant_factors) fs.push_back(d.get_si());
    j["invariant_factors"] = std::move(fs);
  }
  if (S.ring == SolveRing::galois_ring) j["torsion_exponents"] = S.torsion_exponents;
  Json basis = Json::array();
  if (S.ring == SolveRing::laurent_field) {
    for (const auto& row : S.basis) {
      Json r = Json::array();
      for (const PolyFrac& x : row) r.push_back(x.to_string("pi"));
      basis.push_back(std::move(r));
    }
  } else {
    for (const auto& row : S.zbasis) {
      Json r = Json::array();
      for (const mpz_class& x : row) r.push_back(x.get_si());
      basis.push_back(std::move(r));
    }
  }
  j["basis"] = std::move(basis);
  return j;
}

inline Json json_quotient(const QuotientGraph& Q) {
  Json j = json_report("quotient_graph");
  j["group"] = Q.group.name();
  j["q"] = Q.group.R->coeff->q;
  j["depth"] = Q.depth;
  j["betti1"] = betti1(Q);
  Json vs = Json::array();
  for (size_t i = 0; i < Q.vertex_orbits.size(); ++i) {
    const VertexOrbitInfo& v = Q.vertex_orbits[i];
    Json o;
    o["id"] = i;
    o["rep"] = v.rep.to_string();
    o["members"] = v.members.size();
    o["stabilizer_order"] = v.stabilizer_order;
    o["on_cusp_ray"] = v.on_cusp_ray;
    vs.push_back(std::move(o));
  }
  j["vertex_orbits"] = std::move(vs);
  Json es = Json::array();
  for (size_t k = 0; k < Q.edge_orbits.size(); ++k) {
    const EdgeOrbitInfo& e = Q.edge_orbits[k];
    Json o;
    o["id"] = k;
    o["rep"] = e.rep.to_string();
    o["origin_orbit"] = e.origin_orbit;
    o["terminus_orbit"] = e.terminus_orbit;
    o["reversible"] = e.reversible;
    o["on_cusp_ray"] = e.on_cusp_ray;
    o["first_edge"] = e.first_edge;
    es.push_back(std::move(o));
  }
  j["edge_orbits"] = std::move(es);
  Json rays = Json::array();
  for (const CuspRay& r : Q.cusp_rays) {
    Json o;
    o["attachment_orbit"] = r.attachment_orbit;
    o["first_edge"] = r.first_edge.to_string();
    o["first_edge_pair"] = r.first_edge_pair;
    o["segments"] = r.segment_orbits.size();
    rays.push_back(std::move(o));
  }
  j["cusp_rays"] = std::move(rays);
  return j;
}

inline Json json_weight2(const Weight2IntegralReport& r) {
  Json j = json_report("weight2_integral");
  j["group"] = r.group_name;
  j["depth"] = r.depth;
  j["free_rank"] = r.free_rank;
  Json fs = Json::array();
  for (const mpz_class& d : r.invariant_factors) fs.push_back(d.get_si());
  j["invariant_factors"] = std::move(fs);
  j["field_dimension"] = r.field_dimension;
  j["reduced_rank"] = r.reduced_rank;
  Json off = Json::array();
  for (const mpz_class& d : r.offending_torsion) off.push_back(d.get_si());
  j["offending_torsion"] = std::move(off);
  j["reduction_surjective"] = r.reduction_surjective;
  return j;
}

inline Json json_support(const SupportReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["inside"] = r.inside;
  j["outside_vanishing"] = r.outside_vanishing;
  j["unexplored"] = r.unexplored;
  j["verified"] = r.verified;
  if (!r.witness.empty()) j["witness"] = r.witness;
  return j;
}

// ---- DOT renderings ----

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}
}  // namespace detail

// the radius-r ball around the standard vertex as an undirected graph
inline std::string dot_tree_ball(const SeriesRing* R, int radius) {
  TreeBall ball = build_ball(Vertex::standard(R), radius);
  std::string out = "graph ball {\n";
  for (size_t i = 0; i < ball.vertices.size(); ++i)
    out += "  v" + std::to_string(i) + " [label=" +
           detail::dot_quote(ball.vertices[i].to_string()) + "];\n";
  for (size_t i = 0; i < ball.vertices.size(); ++i)
    if (ball.parent[i] >= 0)
      out += "  v" + std::to_string(ball.parent[i]) + " -- v" + std::to_string(i) + ";\n";
  out += "}\n";
  return out;
}

// vertex orbits as nodes, edge-orbit pairs as undirected edges; ray parts dashed
inline std::string dot_quotient(const QuotientGraph& Q) {
  std::string out = "graph quotient {\n";
  for (size_t i = 0; i < Q.vertex_orbits.size(); ++i) {
    const VertexOrbitInfo& v = Q.vertex_orbits[i];
    out += "  o" + std::to_string(i) + " [label=" + detail::dot_quote(v.rep.to_string()) +
           (v.on_cusp_ray ? ", style=dashed" : "") + "];\n";
  }
  for (size_t k = 0; k < Q.edge_orbits.size(); ++k) {
    const EdgeOrbitInfo& e = Q.edge_orbits[k];
    // each unordered class appears once: skip the orientation whose reversal
    // has a smaller id
    const EdgeTag& rt = Q.tag_of(e.rep.reversed());
    if (rt.pair >= 0 && rt.pair < static_cast<int64_t>(k)) continue;
    out += "  o" + std::to_string(e.origin_orbit) + " -- o" +
           std::to_string(e.terminus_orbit) + " [label=\"" + std::to_string(k) + "\"" +
           (e.on_cusp_ray ? ", style=dashed" : "") +
           (e.reversible ? ", color=gray" : "") + "];\n";
  }
  out += "}\n";
  return out;
}

// ---- structural schema validation ----
//
// The shipped schemas use a small subset of JSON Schema: type, required,
// properties, items, enum, minItems. This checks exactly that subset.

namespace detail {

inline bool json_type_is(const Json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

inline void schema_check(const Json& schema, const Json& value, const std::string& path,
                         std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = json_type_is(value, t.get<std::string>());
    else if (t.is_array())
      for (const Json& alt : t)
        if (json_type_is(value, alt.get<std::string>())) ok = true;
    if (!ok) {
      out.push_back(path + ": expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const Json& alt : schema["enum"])
      if (alt == value) ok = true;
    if (!ok) out.push_back(path + ": value " + value.dump() + " not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const Json& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          out.push_back(path + ": missing required key " + key.get<std::string>());
    if (schema.contains("properties"))
      for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
        if (value.contains(it.key()))
          schema_check(it.value(), value[it.key()], path + "/" + it.key(), out);
  }
  if (value.is_array()) {
    if (schema.contains("minItems") &&
        value.size() < schema["minItems"].get<size_t>())
      out.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
    if (schema.contains("items")) {
      size_t i = 0;
      for (const Json& el : value) schema_check(schema["items"], el, path + "[" + std::to_string(i++) + "]", out);
    }
  }
}

}  // namespace detail

inline std::vector<std::string> validate_against_schema(const Json& schema, const Json& value) {
  std::vector<std::string> out;
  detail::schema_check(schema, value, "$", out);
  return out;
}

// ---- group specs ----
//
// "full", "gamma0:POLY", "gamma1:POLY", "gammafull:POLY" with POLY a
// polynomial in t over the coefficient field, e.g. "gamma0:t^3+t+1"
inline ArithmeticGroup parse_gamma_spec(const SeriesRing* R, const std::string& spec) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  if (head == "full") {
    if (colon != std::string::npos) throw UsageError("the full group takes no level");
    return ArithmeticGroup::full(R);
  }
  if (colon == std::string::npos)
    throw UsageError("group spec needs a level: " + spec);
  GFPoly g = parse_poly(R->coeff, spec.substr(colon + 1));
  if (head == "gamma0") return ArithmeticGroup::gamma0(R, g);
  if (head == "gamma1") return ArithmeticGroup::gamma1(R, g);
  if (head == "gammafull") return ArithmeticGroup::gamma_full(R, g);
  throw UsageError("unknown group kind: " + head);
}

}  // namespace cforge
