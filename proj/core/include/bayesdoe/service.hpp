#pragma once

#include <map>
#include <memory>
#include <string>

#include "bayesdoe/campaign.hpp"

namespace bayesdoe {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

struct ServiceConfig {
  std::string campaign_dir = ".";
  std::string cors_origin = "*";
};

/// Campaign endpoints over JSON documents persisted in `campaign_dir`.
/// Stateless between requests and safe to call from many threads.
class Service {
 public:
  explicit Service(ServiceConfig config, Clock clock = utc_timestamp);

  HttpResponse handle(const HttpRequest& request) const;

  /// Path of the document holding campaign `id`.
  std::string campaign_path(const std::string& id) const;

 private:
  ServiceConfig config_;
  Clock clock_;
};

/// Serves a Service over HTTP/1.1.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host`; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bayesdoe
