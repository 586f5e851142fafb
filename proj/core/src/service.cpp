#include "bayesdoe/service.hpp"

#include <charconv>
#include <filesystem>
#include <functional>
#include <random>
#include <regex>

#include <httplib.h>

#include "api_payloads.hpp"
#include "bayesdoe/csv.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "bayesdoe/persistence.hpp"
#include "json_codec.hpp"

namespace bayesdoe {

namespace {

using detail::json;

struct ApiError {
  int status;
  std::string code;
  std::string message;
  json details = nullptr;
  std::optional<long long> revision = std::nullopt;
};

struct Reply {
  int status = 200;
  json data;
  std::optional<long long> revision;
};

const std::regex kIdPattern("^[A-Za-z0-9_-]{1,64}$");

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw ApiError{400, "bad_request", "request body must be a JSON object"};
    return j;
  } catch (const json::parse_error& e) {
    throw ApiError{400, "bad_request", std::string("malformed JSON body: ") + e.what()};
  }
}

std::size_t query_size(const HttpRequest& req, const std::string& key, std::size_t fallback) {
  const auto it = req.query.find(key);
  if (it == req.query.end()) return fallback;
  std::size_t v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ApiError{422, "validation", "query parameter '" + key + "' must be a non-negative integer",
                   json::array({{{"field", key}, {"message", "not a non-negative integer"}}})};
  }
  return v;
}

ApiError field_error(const std::string& field, const std::string& message) {
  return {422, "validation", field + ": " + message,
          json::array({{{"field", field}, {"message", message}}})};
}

std::vector<Observation> parse_rows(const json& body, const CampaignState& s) {
  if (!body.contains("rows") || !body["rows"].is_array()) throw field_error("rows", "required array");
  std::vector<Observation> rows;
  json details = json::array();
  const auto d = static_cast<Eigen::Index>(s.space.dim());
  const auto m = static_cast<Eigen::Index>(s.data.num_outputs());
  const json& arr = body["rows"];
  for (std::size_t r = 0; r < arr.size(); ++r) {
    const json& row = arr[r];
    const std::string prefix = "rows[" + std::to_string(r) + "]";
    Observation obs{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(m)};
    auto number = [&](const json& v, const std::string& field, double& out) {
      if (!v.is_number()) {
        details.push_back({{"field", field}, {"message", "must be a number"}});
        return;
      }
      out = v.get<double>();
    };
    if (!row.is_object()) {
      details.push_back({{"field", prefix}, {"message", "must be an object"}});
      continue;
    }
    if (row.contains("point")) {
      const json& p = row["point"];
      const json o = row.value("outputs", json());
      if (!p.is_array() || static_cast<Eigen::Index>(p.size()) != d) {
        details.push_back({{"field", prefix + ".point"}, {"message", "must be an array of " + std::to_string(d) + " numbers"}});
        continue;
      }
      if (!o.is_array() || static_cast<Eigen::Index>(o.size()) != m) {
        details.push_back({{"field", prefix + ".outputs"}, {"message", "must be an array of " + std::to_string(m) + " numbers"}});
        continue;
      }
      for (Eigen::Index k = 0; k < d; ++k) number(p[static_cast<std::size_t>(k)], prefix + ".point[" + std::to_string(k) + "]", obs.point(k));
      for (Eigen::Index k = 0; k < m; ++k) number(o[static_cast<std::size_t>(k)], prefix + ".outputs[" + std::to_string(k) + "]", obs.outputs(k));
    } else {
      for (Eigen::Index k = 0; k < d; ++k) {
        const std::string& name = s.space[static_cast<std::size_t>(k)].name;
        if (!row.contains(name)) {
          details.push_back({{"field", prefix + "." + name}, {"message", "missing"}});
        } else {
          number(row[name], prefix + "." + name, obs.point(k));
        }
      }
      for (Eigen::Index k = 0; k < m; ++k) {
        const std::string& name = s.data.columns()[static_cast<std::size_t>(k)].name;
        if (!row.contains(name)) {
          details.push_back({{"field", prefix + "." + name}, {"message", "missing"}});
        } else {
          number(row[name], prefix + "." + name, obs.outputs(k));
        }
      }
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      const Variable& v = s.space[static_cast<std::size_t>(k)];
      const double x = obs.point(k);
      if (!(x >= v.lower && x <= v.upper)) {
        details.push_back({{"field", prefix + "." + v.name},
                           {"message", "out of bounds [" + format_number(v.lower) + ", " + format_number(v.upper) + "]"}});
      }
    }
    rows.push_back(std::move(obs));
  }
  if (!details.empty()) {
    throw ApiError{422, "validation", "rejected rows: " + details[0]["field"].get<std::string>() + " " +
                                          details[0]["message"].get<std::string>(),
                   details};
  }
  return rows;
}

json envelope_ok(const Reply& r) {
  json j{{"ok", true}, {"data", r.data}};
  if (r.revision) j["revision"] = *r.revision;
  return j;
}

json envelope_error(const ApiError& e) {
  json err{{"code", e.code}, {"message", e.message}};
  if (!e.details.is_null()) err["details"] = e.details;
  json j{{"ok", false}, {"error", err}};
  if (e.revision) j["revision"] = *e.revision;
  return j;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = path.find('/', i);
    if (i < path.size()) parts.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
    i = j == std::string::npos ? path.size() : j;
  }
  return parts;
}

std::string generate_id(const std::string& request_id) {
  std::uint64_t bits = 0;
  if (!request_id.empty()) {
    bits = mix_seed(std::hash<std::string>{}(request_id), 0x1dULL);
  } else {
    std::random_device rd;
    bits = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(bits));
  return std::string("c") + buf;
}

}  // namespace

Service::Service(ServiceConfig config, Clock clock) : config_(std::move(config)), clock_(std::move(clock)) {
  std::filesystem::create_directories(config_.campaign_dir);
}

std::string Service::campaign_path(const std::string& id) const {
  return (std::filesystem::path(config_.campaign_dir) / (id + ".json")).string();
}

HttpResponse Service::handle(const HttpRequest& req) const {
  HttpResponse res;
  res.headers["Content-Type"] = "application/json";
  res.headers["Access-Control-Allow-Origin"] = config_.cors_origin;
  res.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
  res.headers["Access-Control-Allow-Headers"] = "Content-Type";
  if (req.method == "OPTIONS") {
    res.status = 204;
    return res;
  }

  auto load = [&](const std::string& id) {
    if (!std::regex_match(id, kIdPattern) || !std::filesystem::exists(campaign_path(id))) {
      throw ApiError{404, "not_found", "unknown campaign '" + id + "'"};
    }
    return read_campaign(campaign_path(id));
  };

  try {
    const auto parts = split_path(req.path);
    Reply reply;
    if (parts.empty() || parts[0] != "campaigns" || parts.size() > 3) {
      throw ApiError{404, "not_found", "no route for " + req.path};
    }
    auto require = [&](const char* method) {
      if (req.method != method) throw ApiError{405, "method_not_allowed", req.method + " not allowed on " + req.path};
    };

    if (parts.size() == 1) {
      require("POST");
      const json body = parse_body(req.body);
      const std::string request_id = body.value("request_id", std::string());
      std::string id = body.value("id", std::string());
      if (id.empty()) id = generate_id(request_id);
      if (!std::regex_match(id, kIdPattern)) throw field_error("id", "must match [A-Za-z0-9_-]{1,64}");
      if (std::filesystem::exists(campaign_path(id))) {
        const CampaignState existing = read_campaign(campaign_path(id));
        if (!request_id.empty() && existing.history.front().request_id == request_id) {
          reply.data = detail::summary_payload(existing);
          reply.data["id"] = id;
          res.status = 201;
          res.body = envelope_ok({201, reply.data, existing.revision}).dump();
          return res;
        }
        throw ApiError{409, "conflict", "campaign '" + id + "' already exists", nullptr, existing.revision};
      }
      const json space_json = body.contains("space") ? body["space"] : body.value("variables", json());
      if (space_json.is_null()) throw field_error("space", "required");
      DesignSpace space;
      try {
        space = detail::space_from_json(space_json);
      } catch (const Error& e) {
        throw field_error("space", e.what());
      }
      std::vector<OutputColumn> outputs;
      const json specs = body.contains("specs") ? body["specs"] : body.value("outputs", json());
      if (!specs.is_array() || specs.empty()) throw field_error("specs", "required non-empty array");
      for (std::size_t i = 0; i < specs.size(); ++i) {
        try {
          outputs.push_back(detail::column_from_json(specs[i]));
        } catch (const Error& e) {
          throw field_error("specs[" + std::to_string(i) + "]", e.what());
        }
      }
      AcquisitionSpec acq;
      if (body.contains("acquisition")) acq = detail::acquisition_from_json(body["acquisition"]);
      CampaignSettings settings;
      if (body.contains("settings")) settings = detail::settings_from_json(body["settings"]);
      CampaignState state = init_campaign(std::move(space), std::move(outputs), std::move(acq),
                                          body.value("seed", std::uint64_t{0}), settings, clock_);
      state.history.front().request_id = request_id;
      write_campaign(campaign_path(id), state, kNoCampaign);
      reply.status = 201;
      reply.data = detail::summary_payload(state);
      reply.data["id"] = id;
      reply.revision = state.revision;
    } else {
      const std::string& id = parts[1];
      const std::string verb = parts.size() == 3 ? parts[2] : std::string();
      if (verb.empty()) {
        require("GET");
        const CampaignState s = load(id);
        reply.data = detail::summary_payload(s);
        reply.data["id"] = id;
        reply.revision = s.revision;
      } else if (verb == "ask") {
        require("POST");
        const json body = parse_body(req.body);
        const CampaignState s = load(id);
        AskOptions opts;
        opts.request_id = body.value("request_id", std::string());
        if (body.contains("strategy") && !body["strategy"].is_null()) {
          try {
            opts.strategy = parse_batch_strategy(body["strategy"].get<std::string>());
          } catch (const Error& e) {
            throw field_error("strategy", e.what());
          }
        }
        if (body.contains("seed")) opts.seed = body["seed"].get<std::uint64_t>();
        const std::size_t q = body.value("q", std::size_t{1});
        const HistoryEvent* previous = nullptr;
        for (const auto& ev : s.history) {
          if (!opts.request_id.empty() && ev.kind == "ask" && ev.request_id == opts.request_id) previous = &ev;
        }
        if (previous) {
          AskResult replayed{s, previous->points, {}};
          replayed.state.revision = previous->revision;
          replayed.diagnostics.mode = "replayed";
          reply.data = detail::ask_payload(replayed);
          reply.revision = s.revision;
        } else {
          const AskResult r = ask(s, q, opts, clock_);
          write_campaign(campaign_path(id), r.state, s.revision);
          reply.data = detail::ask_payload(r);
          reply.revision = r.state.revision;
        }
      } else if (verb == "tell") {
        require("POST");
        const json body = parse_body(req.body);
        const CampaignState s = load(id);
        const std::string request_id = body.value("request_id", std::string());
        const bool seen = !request_id.empty() &&
                          std::any_of(s.history.begin(), s.history.end(), [&](const HistoryEvent& ev) {
                            return ev.kind == "tell" && ev.request_id == request_id;
                          });
        if (seen) {
          reply.data = detail::tell_payload(s, 0);
          reply.data["replayed"] = true;
          reply.revision = s.revision;
        } else {
          if (body.contains("revision") && body["revision"].get<long long>() != s.revision) {
            throw ApiError{409, "conflict",
                           "campaign is at revision " + std::to_string(s.revision) + ", request was based on " +
                               std::to_string(body["revision"].get<long long>()),
                           nullptr, s.revision};
          }
          const auto rows = parse_rows(body, s);
          const CampaignState next = tell(s, rows, request_id, clock_);
          write_campaign(campaign_path(id), next, s.revision);
          reply.data = detail::tell_payload(next, rows.size());
          reply.revision = next.revision;
        }
      } else if (verb == "recommend") {
        require("GET");
        const CampaignState s = load(id);
        reply.data = detail::recommend_payload(s, recommend(s));
        reply.revision = s.revision;
      } else if (verb == "pareto") {
        require("GET");
        const CampaignState s = load(id);
        reply.data = detail::pareto_payload(s);
        reply.revision = s.revision;
      } else if (verb == "trace") {
        require("GET");
        const CampaignState s = load(id);
        reply.data = detail::trace_payload(s);
        reply.revision = s.revision;
      } else if (verb == "slice") {
        require("GET");
        const CampaignState s = load(id);
        std::size_t dim = 0;
        const auto dim_it = req.query.find("dim");
        if (dim_it != req.query.end() && s.space.index_of(dim_it->second) < s.space.dim()) {
          dim = s.space.index_of(dim_it->second);
        } else {
          dim = query_size(req, "dim", 0);
        }
        if (dim >= s.space.dim()) throw field_error("dim", "must be below " + std::to_string(s.space.dim()));
        const std::size_t points = query_size(req, "points", 200);
        if (points < 2 || points > 5000) throw field_error("points", "must be between 2 and 5000");
        std::size_t output = s.data.objective_indices().front();
        const auto out_it = req.query.find("output");
        if (out_it != req.query.end()) {
          output = s.data.output_index(out_it->second);
          if (output == s.data.num_outputs()) throw field_error("output", "unknown output column");
        }
        if (s.data.size() < 2) {
          throw ApiError{422, "insufficient_data", "a posterior slice needs at least 2 observations",
                         nullptr, s.revision};
        }
        const Recommendation rec = recommend(s);
        reply.data = detail::slice_payload(s, dim, points, rec.point, output);
        reply.revision = s.revision;
      } else {
        throw ApiError{404, "not_found", "no route for " + req.path};
      }
    }
    res.status = reply.status;
    res.body = envelope_ok(reply).dump();
  } catch (const ApiError& e) {
    res.status = e.status;
    res.body = envelope_error(e).dump();
  } catch (const ConflictError& e) {
    res.status = 409;
    res.body = envelope_error({409, "conflict", e.what(), nullptr, e.current_revision()}).dump();
  } catch (const json::exception& e) {
    res.status = 422;
    res.body = envelope_error({422, "validation", std::string("unexpected request shape: ") + e.what()}).dump();
  } catch (const InsufficientDataError& e) {
    res.status = 422;
    res.body = envelope_error({422, "insufficient_data", e.what()}).dump();
  } catch (const ValidationError& e) {
    res.status = 422;
    res.body = envelope_error({422, "validation", e.what(), json::array({{{"field", "rows"}, {"message", e.what()}}})}).dump();
  } catch (const ArgumentError& e) {
    res.status = 422;
    res.body = envelope_error({422, "validation", e.what()}).dump();
  } catch (const UnsupportedError& e) {
    res.status = 422;
    res.body = envelope_error({422, "unsupported", e.what()}).dump();
  } catch (const MigrationError& e) {
    res.status = 500;
    res.body = envelope_error({500, "migration", e.what()}).dump();
  } catch (const std::exception& e) {
    res.status = 500;
    res.body = envelope_error({500, "internal", e.what()}).dump();
  }
  return res;
}

struct HttpServer::Impl {
  const Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(new Impl{service, {}}) {
  auto forward = [this](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req{in.method, in.path, {}, in.body};
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    const HttpResponse r = impl_->service.handle(req);
    out.status = r.status;
    for (const auto& [k, v] : r.headers) {
      if (k != "Content-Type") out.set_header(k, v);
    }
    const auto ct = r.headers.find("Content-Type");
    out.set_content(r.body, ct == r.headers.end() ? "application/json" : ct->second);
  };
  const std::string all = R"(/.*)";
  impl_->server.Get(all, forward);
  impl_->server.Post(all, forward);
  impl_->server.Options(all, forward);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace bayesdoe
