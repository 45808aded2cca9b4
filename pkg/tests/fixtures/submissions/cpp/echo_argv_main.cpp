#include <iostream>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    int n = 0;
    std::cin >> n;
    std::cout << 2 * n << "\n";
    return 0;
}
