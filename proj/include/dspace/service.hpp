#pragma once

// HTTP API as a pure function of (method, target, headers, body) over a
// Store. The socket layer (tools/) only forwards requests here.

#include <charconv>
#include <map>
#include <string>
#include <string_view>

#include "dspace/store.hpp"

namespace dspace {

struct HttpRequest {
  std::string method;
  std::string target;  // raw path plus optional "?query"
  std::string body;
  std::optional<std::string> owner;  // X-Owner-Id header
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

inline int http_status(Errc code) {
  switch (code) {
    case Errc::unknown_dsi:
    case Errc::not_found: return 404;
    case Errc::fixed_part_mutation:
    case Errc::invalid_transition: return 409;
    case Errc::forbidden: return 403;
    case Errc::no_snapshot: return 503;
    case Errc::io_error:
    case Errc::no_side_index: return 500;
    default: return 400;
  }
}

inline std::string error_body(std::string_view code, std::string_view message) {
  return Json{{"code", code}, {"message", message}}.dump();
}

/// Search JSON shared by the HTTP endpoint and the CLI.
inline std::string run_search(Store& store, const SearchRequest& req) {
  const auto snap = store.require_snapshot();
  const auto result = numeric_search(req, *snap, &store.counters());
  store.save_counters();
  return to_json(result).dump();
}

/// Detail view of record c; increments its access count a.
inline Json dv_detail(Store& store, std::uint64_t c) {
  const auto snap = store.require_snapshot();
  const auto* rec = snap->record(c);
  if (!rec) fail(Errc::not_found, "no record with c = " + std::to_string(c));
  const auto group = store.group(rec->group);
  if (!group) fail(Errc::not_found, "record " + std::to_string(c) + " is not in the DV log");
  const auto a = store.counters().touch(c);
  store.save_counters();

  Json members = Json::array();
  for (const auto& dv : group->members) {
    const auto* schema = snap->schema(dv.dsi);
    Json values = Json::object();
    for (const auto& inst : dv.dims) {
      if (const auto* ref = std::get_if<DvRef>(&inst.value)) {
        values[inst.path] = Json{{"ref", ref->url}};
      } else if (const auto* s = std::get_if<std::string>(&inst.value)) {
        values[inst.path] = *s;
      } else {
        const double v = std::get<double>(inst.value);
        const auto i = schema ? schema->index_of(inst.path) : std::nullopt;
        if (!i) {
          values[inst.path] = v;
          continue;
        }
        const auto& content = schema->leaves[*i].content;
        switch (content.kind) {
          case LeafKind::integer:
          case LeafKind::money:
          case LeafKind::float_medium:
          case LeafKind::float_max: values[inst.path] = v; break;
          default: values[inst.path] = decode_value(content, v);
        }
      }
    }
    Json m = {{"dsi", dv.dsi}, {"values", std::move(values)}};
    if (schema) m["dv"] = serialize_dv(dv, *schema);
    members.push_back(std::move(m));
  }
  Json j = {{"c", c}, {"a", a}, {"members", std::move(members)}};
  if (rec->vl) j["vl"] = *rec->vl;
  if (rec->resource) j["resource"] = *rec->resource;
  if (rec->keycomment) j["keycomment"] = *rec->keycomment;
  return j;
}

class Service {
 public:
  explicit Service(Store& store) : store_(store) {}

  HttpResponse handle(const HttpRequest& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      return HttpResponse{http_status(e.code()), error_body(errc_name(e.code()), e.what())};
    } catch (const Json::exception& e) {
      return HttpResponse{400, error_body("invalid_argument", e.what())};
    } catch (const std::exception& e) {
      return HttpResponse{500, error_body("internal", e.what())};
    }
  }

 private:
  static std::map<std::string, std::string> parse_query(std::string_view q) {
    std::map<std::string, std::string> out;
    while (!q.empty()) {
      auto amp = q.find('&');
      auto part = q.substr(0, amp);
      auto eq = part.find('=');
      std::string key = text::percent_decode(part.substr(0, eq));
      std::string val = eq == std::string_view::npos ? "" : plus_decode(part.substr(eq + 1));
      out[key] = val;
      if (amp == std::string_view::npos) break;
      q.remove_prefix(amp + 1);
    }
    return out;
  }

  static std::string plus_decode(std::string_view s) {
    std::string t(s);
    std::replace(t.begin(), t.end(), '+', ' ');
    return text::percent_decode(t);
  }

  static HttpResponse ok(const Json& j, int status = 200) { return HttpResponse{status, j.dump()}; }

  static HttpResponse not_found(std::string_view what) {
    return HttpResponse{404, error_body("not_found", "no route for " + std::string(what))};
  }

  std::optional<std::int64_t> owner(const HttpRequest& req) const {
    if (!req.owner) return std::nullopt;
    std::int64_t v = 0;
    const auto& s = *req.owner;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail(Errc::invalid_argument, "X-Owner-Id must be an integer");
    return v;
  }

  HttpResponse route(const HttpRequest& req) {
    std::string_view target = req.target;
    std::string_view query;
    if (auto q = target.find('?'); q != std::string_view::npos) {
      query = target.substr(q + 1);
      target = target.substr(0, q);
    }
    const auto& m = req.method;

    if (target == "/healthz") {
      if (m != "GET") return method_not_allowed(m);
      return ok(Json{{"status", "ok"},
                     {"snapshot", store_.snapshot() != nullptr},
                     {"definitions", store_.registry().size()},
                     {"groups", store_.group_count()}});
    }
    if (target == "/ds") {
      if (m == "GET") return find(parse_query(query));
      if (m == "POST") return define(req);
      return method_not_allowed(m);
    }
    if (target.starts_with("/ds/")) {
      auto rest = target.substr(4);
      if (m == "POST" && rest.ends_with("/dv")) return ingest(text::percent_decode(rest.substr(0, rest.size() - 3)), req);
      if (m == "GET") return get_definition(text::percent_decode(rest));
      return method_not_allowed(m);
    }
    if (target.starts_with("/dv/")) {
      if (m != "GET") return method_not_allowed(m);
      const auto s = target.substr(4);
      std::uint64_t c = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), c);
      if (ec != std::errc{} || p != s.data() + s.size()) fail(Errc::invalid_argument, "record counter must be an integer");
      return ok(dv_detail(store_, c));
    }
    if (target == "/search") {
      if (m != "POST") return method_not_allowed(m);
      const auto j = Json::parse(req.body);
      return HttpResponse{200, run_search(store_, search_request_from_json(j))};
    }
    if (target == "/index/build") {
      if (m != "POST") return method_not_allowed(m);
      const auto snap = store_.build_index();
      const auto& r = snap->report();
      return ok(Json{{"groups", r.groups},
                     {"accepted", r.accepted},
                     {"rejected", r.rejected},
                     {"records", r.records},
                     {"columns", snap->columns().size()},
                     {"errors", r.errors}});
    }
    return not_found(target);
  }

  static HttpResponse method_not_allowed(std::string_view m) {
    return HttpResponse{405, error_body("method_not_allowed", std::string(m) + " not allowed here")};
  }

  HttpResponse find(const std::map<std::string, std::string>& q) {
    auto it = q.find("query");
    const std::string query = it == q.end() ? "" : it->second;
    const auto snap = store_.snapshot();
    Json results = Json::array();
    for (const auto& h : find_ds(query, store_.registry(), snap.get(), &store_.counters())) {
      results.push_back(Json{{"dsi", h.dsi}, {"kw0", h.kw0}, {"s", h.s}, {"r", h.r}});
    }
    return ok(Json{{"results", std::move(results)}});
  }

  HttpResponse define(const HttpRequest& req) {
    auto res = store_.define(parse_ds_definition(req.body), owner(req));
    return ok(Json{{"dsi", res.def->dsi},
                   {"version", res.version},
                   {"created", res.created},
                   {"checksum", fixed_part_checksum(*res.def)}},
              res.created ? 201 : 200);
  }

  HttpResponse get_definition(const std::string& dsi) {
    auto def = store_.registry().find(dsi);
    if (!def) fail(Errc::unknown_dsi, "unknown DSI '" + dsi + "'");
    return ok(Json{{"definition", to_json(*def)},
                   {"version", store_.registry().version_count(dsi)},
                   {"checksum", fixed_part_checksum(*def)}});
  }

  // Body: {"dv": "..."}, {"group": ["...", "+..."]} or {"log": "..."}.
  HttpResponse ingest(const std::string& dsi, const HttpRequest& req) {
    if (!store_.registry().find(dsi)) fail(Errc::unknown_dsi, "unknown DSI '" + dsi + "'");
    const auto j = Json::parse(req.body);
    if (!j.is_object()) fail(Errc::invalid_argument, "body must be a JSON object");
    std::string log;
    if (j.contains("dv")) {
      log = j.at("dv").get<std::string>();
      if (log.find('\n') != std::string::npos) fail(Errc::invalid_argument, "'dv' must be a single DV");
    } else if (j.contains("group")) {
      bool first = true;
      for (const auto& line : j.at("group")) {
        auto s = line.get<std::string>();
        if (s.find('\n') != std::string::npos) fail(Errc::invalid_argument, "group members must be single lines");
        log += (first || s.starts_with("+") ? "" : "+") + s + "\n";
        first = false;
      }
    } else if (j.contains("log")) {
      log = j.at("log").get<std::string>();
    } else {
      fail(Errc::invalid_argument, "body needs 'dv', 'group' or 'log'");
    }
    auto groups = store_.parse_log(log);
    if (groups.empty()) fail(Errc::invalid_argument, "no DV in request body");
    for (const auto& g : groups) {
      const bool has = std::any_of(g.members.begin(), g.members.end(), [&](const auto& dv) { return dv.dsi == dsi; });
      if (!has) fail(Errc::invalid_argument, "every group must carry a DV of " + dsi);
    }
    const auto r = store_.ingest(groups);
    return ok(Json{{"groups", r.groups}, {"first", r.first}}, 201);
  }

  Store& store_;
};

}  // namespace dspace
