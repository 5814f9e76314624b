#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "dspace/dspace.hpp"

namespace fs = std::filesystem;
using namespace dspace;

namespace {

std::vector<fs::path> files_in(const fs::path& p, std::initializer_list<std::string_view> exts) {
  if (!fs::is_directory(p)) {
    if (!fs::exists(p)) fail(Errc::not_found, "no such file: " + p.string());
    return {p};
  }
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fetch_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    fail(Errc::invalid_argument, "--fetch supports http:// URLs only");
  }
  const auto slash = url.find('/', scheme + 3);
  const auto host = url.substr(0, slash);
  const auto path = slash == std::string::npos ? "/" : url.substr(slash);
  httplib::Client cli(host);
  auto res = cli.Get(path);
  if (!res) fail(Errc::io_error, "cannot fetch " + url);
  if (res->status != 200) fail(Errc::io_error, "fetching " + url + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

// "path=value" with the value kept as a number when it parses as one.
std::pair<std::string, QueryValue> split_assignment(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) fail(Errc::invalid_argument, "expected path=value, got '" + arg + "'");
  const auto raw = arg.substr(eq + 1);
  if (auto n = text::parse_double(raw)) return {arg.substr(0, eq), *n};
  return {arg.substr(0, eq), raw};
}

struct SearchFlags {
  std::string ds;
  std::vector<std::string> sim, min, max, g, word, tux;
  std::size_t pcnt = kMaxPcnt;
  std::optional<bool> offered, wanted;
  bool json = false;
  bool table = false;
};

SearchRequest to_request(const SearchFlags& f) {
  SearchRequest req;
  req.dsi = f.ds;
  req.pcnt = f.pcnt;
  req.offered = f.offered;
  req.wanted = f.wanted;
  auto cond = [&](const std::string& path) -> DimCondition& {
    for (auto& d : req.dims) {
      if (d.path == path) return d;
    }
    req.dims.push_back(DimCondition{path, {}, {}, {}, false, {}, {}});
    return req.dims.back();
  };
  for (const auto& a : f.sim) {
    auto [p, v] = split_assignment(a);
    cond(p).sim = v;
  }
  for (const auto& a : f.min) {
    auto [p, v] = split_assignment(a);
    cond(p).min = v;
  }
  for (const auto& a : f.max) {
    auto [p, v] = split_assignment(a);
    cond(p).max = v;
  }
  for (const auto& p : f.g) cond(p).g = true;
  for (const auto& a : f.word) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) fail(Errc::invalid_argument, "expected path=word, got '" + a + "'");
    cond(a.substr(0, eq)).word = a.substr(eq + 1);
  }
  for (const auto& a : f.tux) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) fail(Errc::invalid_argument, "expected path=prefix, got '" + a + "'");
    cond(a.substr(0, eq)).tux = a.substr(eq + 1);
  }
  return req;
}

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return text::format_double(v.get<double>());
  return v.dump();
}

void print_table(const Json& result, std::ostream& os) {
  std::vector<std::string> cols;
  for (const auto& h : result.at("hits")) {
    for (const auto& [k, v] : h.at("values").items()) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  os << "total " << result.at("total").get<std::uint64_t>() << ", shown " << result.at("hits").size() << "\n";
  for (const auto& [path, s] : result.at("stats").items()) {
    os << path << ": av " << text::format_double(s.at("av").get<double>()) << "  sd "
       << text::format_double(s.at("sd").get<double>()) << "  min " << text::format_double(s.at("min").get<double>())
       << "  max " << text::format_double(s.at("max").get<double>()) << "\n";
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"c", "d"};
  head.insert(head.end(), cols.begin(), cols.end());
  head.push_back("keycomment");
  rows.push_back(head);
  for (const auto& h : result.at("hits")) {
    std::vector<std::string> r = {std::to_string(h.at("c").get<std::uint64_t>()), cell(h.at("d"))};
    for (const auto& c : cols) r.push_back(h.at("values").contains(c) ? cell(h.at("values").at(c)) : "");
    r.push_back(h.value("keycomment", ""));
    rows.push_back(std::move(r));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i + 1 < r.size()) {
        line += std::string(width[i] - r[i].size(), ' ') + r[i] + "  ";
      } else {
        line += r[i];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << "\n";
  }
}

// Exact DSI, or the unique DSI whose last path segment equals `name`.
std::string resolve_dsi(const Store& store, const std::string& name) {
  if (store.registry().find(name)) return name;
  std::string hit;
  for (const auto& d : store.registry().all()) {
    if (d->dsi.ends_with("/" + name)) {
      if (!hit.empty()) fail(Errc::invalid_argument, "'" + name + "' matches several spaces; give the full DSI");
      hit = d->dsi;
    }
  }
  if (hit.empty()) fail(Errc::unknown_dsi, "unknown DSI '" + name + "'");
  return hit;
}

int serve(Store& store, const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) fail(Errc::invalid_argument, "--listen expects host:port");
  const auto host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));
  Service service(store);
  httplib::Server svr;
  auto handler = [&](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.target, req.body, std::nullopt};
    if (req.has_header("X-Owner-Id")) r.owner = req.get_header_value("X-Owner-Id");
    const auto out = service.handle(r);
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(out.body, "application/json");
  };
  svr.Get(".*", handler);
  svr.Post(".*", handler);
  svr.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Owner-Id");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!svr.listen(host, port)) fail(Errc::io_error, "cannot listen on " + listen);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain Space engine: definitions, DV ingest, index and search"};
  app.require_subcommand(1);
  std::string data_dir = default_data_dir().string();
  app.add_option("--data", data_dir, "Data directory (default: $DSPACE_DATA_DIR or ./dspace-data)");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  std::string listen = "127.0.0.1:8080";
  serve_cmd->add_option("--listen", listen, "host:port");

  auto* define_cmd = app.add_subcommand("define", "Register definitions from a file, a directory of .json files or a URL");
  std::string define_path;
  bool fetch = false;
  std::optional<std::int64_t> owner;
  define_cmd->add_option("path", define_path)->required();
  define_cmd->add_flag("--fetch", fetch, "Treat path as an http:// URL");
  define_cmd->add_option("--owner", owner, "Acting owner ID");

  auto* ingest_cmd = app.add_subcommand("ingest", "Append DVs from a DV log file or a directory of .log/.dvs files");
  std::string ingest_path;
  ingest_cmd->add_option("path", ingest_path)->required();

  auto* index_cmd = app.add_subcommand("index", "Build the index snapshot");

  auto* search_cmd = app.add_subcommand("search", "Similarity / range search in one space");
  SearchFlags sf;
  search_cmd->add_option("--ds", sf.ds, "DSI")->required();
  search_cmd->add_option("--sim", sf.sim, "path=value");
  search_cmd->add_option("--min", sf.min, "path=value");
  search_cmd->add_option("--max", sf.max, "path=value");
  search_cmd->add_option("--g", sf.g, "path whose statistics are reported");
  search_cmd->add_option("--word", sf.word, "path=word");
  search_cmd->add_option("--tux", sf.tux, "path=prefix");
  search_cmd->add_option("--pcnt", sf.pcnt, "hits returned (1..1000)");
  search_cmd->add_option("--offered", sf.offered);
  search_cmd->add_option("--wanted", sf.wanted);
  auto* json_flag = search_cmd->add_flag("--json", sf.json, "Print the response JSON");
  search_cmd->add_flag("--table", sf.table, "Print a table (default)")->excludes(json_flag);

  auto* bench_cmd = app.add_subcommand("bench", "Synthetic search benchmark");
  BenchConfig bc;
  bench_cmd->add_option("--dims", bc.dims)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dvs", bc.dvs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--searches", bc.searches);
  bench_cmd->add_option("--seed", bc.seed);
  bench_cmd->add_option("--max-d", bc.max_d);
  bench_cmd->add_option("--rounds", bc.rounds);

  auto* rdf_cmd = app.add_subcommand("rdf", "RDF bridge");
  rdf_cmd->require_subcommand(1);
  std::string rdf_base = "urn:dspace:rdf";
  auto* rdf_import = rdf_cmd->add_subcommand("import", "Load N-Triples as DVs");
  std::string rdf_in;
  rdf_import->add_option("file", rdf_in)->required();
  rdf_import->add_option("--base", rdf_base, "DSI prefix of the generated spaces");
  auto* rdf_export = rdf_cmd->add_subcommand("export", "Write bridge-generated DVs as N-Triples");
  std::string rdf_out;
  rdf_export->add_option("--base", rdf_base, "DSI prefix of the generated spaces");
  rdf_export->add_option("-o,--output", rdf_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench_cmd) {
      std::cout << to_json(run_bench(bc)).dump(2) << "\n";
      return 0;
    }

    Store store(data_dir);

    if (*serve_cmd) return serve(store, listen);

    if (*define_cmd) {
      std::vector<std::pair<std::string, std::string>> docs;
      if (fetch) {
        docs.emplace_back(define_path, fetch_url(define_path));
      } else {
        for (const auto& f : files_in(define_path, {".json"})) docs.emplace_back(f.string(), read_file(f));
      }
      for (const auto& [name, doc] : docs) {
        try {
          auto res = store.define(parse_ds_definition(doc), owner);
          std::cout << res.def->dsi << " v" << res.version << (res.created ? " created " : " ")
                    << fixed_part_checksum(*res.def) << "\n";
        } catch (const Error& e) {
          throw Error(e.code(), name + ": " + e.what());
        }
      }
      return 0;
    }

    if (*ingest_cmd) {
      std::size_t n = 0;
      for (const auto& f : files_in(ingest_path, {".log", ".dvs"})) {
        try {
          n += store.ingest_text(read_file(f)).groups;
        } catch (const Error& e) {
          throw Error(e.code(), f.string() + ": " + e.what());
        }
      }
      std::cout << "ingested " << n << " groups (" << store.group_count() << " total)\n";
      return 0;
    }

    if (*index_cmd) {
      const auto snap = store.build_index();
      const auto& r = snap->report();
      std::cout << "groups " << r.groups << ", accepted " << r.accepted << ", rejected " << r.rejected << ", records "
                << r.records << ", columns " << snap->columns().size() << "\n";
      for (const auto& e : r.errors) std::cout << "  " << e << "\n";
      return 0;
    }

    if (*search_cmd) {
      auto req = to_request(sf);
      req.dsi = resolve_dsi(store, req.dsi);
      const auto body = run_search(store, req);
      if (sf.json) {
        std::cout << body << "\n";
      } else {
        print_table(Json::parse(body), std::cout);
      }
      return 0;
    }

    if (*rdf_import) {
      const auto triples = parse_ntriples(read_file(rdf_in));
      const auto mapping = triples_to_dvs(triples, rdf_base);
      for (const auto& s : mapping.spaces) store.define(s);
      store.ingest(mapping.groups);
      std::cout << "imported " << triples.size() << " triples as " << mapping.groups.size() << " groups in "
                << mapping.spaces.size() << " spaces\n";
      return 0;
    }

    if (*rdf_export) {
      const auto prefix = rdf_base + "/";
      std::vector<DomainSpaceDef> spaces;
      for (const auto& d : store.registry().all()) {
        if (d->dsi.starts_with(prefix)) spaces.push_back(*d);
      }
      std::vector<DVGroup> groups;
      for (auto g : store.groups()) {
        std::erase_if(g.members, [&](const DomainVector& dv) { return !dv.dsi.starts_with(prefix); });
        if (!g.members.empty()) groups.push_back(std::move(g));
      }
      const auto out = write_ntriples(dvs_to_triples(spaces, groups));
      if (rdf_out.empty()) {
        std::cout << out;
      } else {
        std::ofstream os(rdf_out, std::ios::binary);
        os << out;
        if (!os) fail(Errc::io_error, "cannot write " + rdf_out);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
