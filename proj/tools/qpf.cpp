#include <qpf/cli.hpp>

int main(int argc, char** argv) { return qpf::cli::dispatch(argc, argv); }
