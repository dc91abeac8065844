// rpgraph-server: what-if bid explorer API.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rpgraph/http.hpp"
#include "rpgraph/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"What-if bid explorer service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log_dir;
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "listen port");
  app.add_option("--log-dir", log_dir, "directory for per-session event logs (enables recovery)");
  CLI11_PARSE(app, argc, argv);

  try {
    auto sessions = log_dir.empty() ? rpgraph::service::SessionManager()
                                    : rpgraph::service::SessionManager(std::filesystem::path(log_dir));
    sessions.recover();
    rpgraph::http::Api api(sessions);
    httplib::Server server;
    rpgraph::http::mount(server, api);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
