#pragma once

#include "kad/controller.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

namespace kad {

/// HTTP+JSON front end over one engine:
///   POST /session, POST /chat, GET /kb[?status=], GET /queue, POST /save.
class Service {
public:
    Service(Engine &engine, std::filesystem::path kb_path);
    ~Service();
    Service(const Service &) = delete;
    Service &operator=(const Service &) = delete;

    /// Blocks until stop().
    bool listen(const std::string &host, int port);
    /// Binds an ephemeral port and returns it; call listen_after_bind() next.
    int bind_any_port(const std::string &host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Line-oriented chat over one session; `:save`, `:kb`, `:queue`, `:quit`.
/// Saves the KB to `kb_path` on `:quit` and at end of input. Returns the exit code.
int run_repl(Engine &engine, const std::filesystem::path &kb_path, std::istream &in, std::ostream &out);

} // namespace kad
