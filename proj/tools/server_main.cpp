#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bayesdoe/service.hpp"

namespace {
bayesdoe::HttpServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP/JSON service for bayesdoe campaigns", "bayesdoe-server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  bayesdoe::ServiceConfig config;
  if (const char* dir = std::getenv("BAYESDOE_CAMPAIGN_DIR")) config.campaign_dir = dir;
  if (const char* p = std::getenv("BAYESDOE_PORT")) port = std::atoi(p);
  app.add_option("--host", host, "Bind address");
  app.add_option("--port,-p", port, "Port (0 picks a free one)");
  app.add_option("--dir", config.campaign_dir, "Campaign directory");
  app.add_option("--cors-origin", config.cors_origin, "Allowed CORS origin");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const bayesdoe::Service service(config);
  bayesdoe::HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ":" << bound << std::endl;
  return server.listen_after_bind() ? 0 : 1;
}
