#include "scvx/quadrotor.hpp"

int main(int argc, char** argv) { return scvx::run_cli(argc, argv); }
