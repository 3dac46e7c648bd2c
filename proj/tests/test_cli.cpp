#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"

// SHUM_CLI_PATH is injected by the build and points at the built executable.

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path base = fs::temp_directory_path() / fmt::format("shum_cli_{}_{}", ::getpid(), counter++);
    fs::path out_path = base.string() + ".out";
    fs::path err_path = base.string() + ".err";
    std::string command = std::string(SHUM_CLI_PATH) + " " + args + " > " + out_path.string()
                          + " 2> " + err_path.string();
    int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return result;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& contents, const char* suffix) {
        static int counter = 0;
        path = fs::temp_directory_path()
               / fmt::format("shum_cli_file_{}_{}{}", ::getpid(), counter++, suffix);
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { fs::remove(path); }
};

} // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
    CliResult result = run_cli("--help");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("verify-identities") != std::string::npos);
    CHECK(result.out.find("observability") != std::string::npos);
}

TEST_CASE("identity verification passes at default tolerance") {
    CliResult result = run_cli("verify-identities --n 6 --trials 20");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("PASS") != std::string::npos);
    CHECK(result.out.find("FAIL") == std::string::npos);
    CHECK(result.err.empty());
}

TEST_CASE("unknown flags and missing subcommands are parse errors") {
    CHECK(run_cli("verify-identities --frobnicate 1").exit_code == 2);
    CHECK(run_cli("").exit_code != 0);
    CliResult result = run_cli("control --N notanumber");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("expects a number") == std::string::npos); // N is an integer key
    CHECK(result.err.find("expects an integer") != std::string::npos);
}

TEST_CASE("config file values load and invalid ones fail at run time") {
    TempFile good("N = 6\nK = 3\neps = 1e-3\n", ".cfg");
    CliResult ok = run_cli("control --config " + good.path.string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("N,h,K,T,") != std::string::npos);
    CHECK(ok.out.find("\n6,") != std::string::npos);

    TempFile bad("delta = 0.6\n", ".cfg");
    CliResult broken = run_cli("weights --config " + bad.path.string());
    CHECK(broken.exit_code == 2);
    CHECK(broken.err.find("config error") != std::string::npos);
    CHECK(broken.err.find("(0, 1/2)") != std::string::npos);
}

TEST_CASE("flags override config file values") {
    TempFile file("N = 6\nK = 3\ntol = 1e-30\n", ".cfg");
    // The file pins an impossible tolerance; the flag restores a sane one.
    CliResult result =
        run_cli("verify-identities --trials 10 --config " + file.path.string() + " --tol 1e-10");
    CHECK(result.exit_code == 0);
}

TEST_CASE("weights dump is CSV with the expected header") {
    CliResult result = run_cli("weights --n 6 --t_samples 3");
    CHECK(result.exit_code == 0);
    CHECK(result.out.rfind("t,x,theta,s,phi,r\n", 0) == 0);
}

TEST_CASE("simulate prints one energy row per time level") {
    CliResult result = run_cli("simulate --n 5 --K 3");
    CHECK(result.exit_code == 0);
    CHECK(result.out.rfind("k,t,energy\n", 0) == 0);
    CHECK(result.out.find("\n3,") != std::string::npos);
}

TEST_CASE("output lands in the file given by -o") {
    static int counter = 0;
    fs::path out_path = fs::temp_directory_path()
                        / fmt::format("shum_cli_o_{}_{}.csv", ::getpid(), counter++);
    CliResult result = run_cli("weights --n 6 --t_samples 2 -o " + out_path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.out.empty());
    CHECK(slurp(out_path).rfind("t,x,theta,s,phi,r\n", 0) == 0);
    fs::remove(out_path);
}

TEST_CASE("sweep runs its grid on worker threads") {
    CliResult result = run_cli("sweep --N_list 5,6 --T_list 1 --K 3 --eps 1e-3 --workers 2");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("\n5,") != std::string::npos);
    CHECK(result.out.find("\n6,") != std::string::npos);
}

TEST_CASE("carleman table prints totals and the regime line") {
    CliResult result = run_cli("carleman --n 7 --K 3");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("lhs_total") != std::string::npos);
    CHECK(result.out.find("regime lambda_ok=") != std::string::npos);
}
