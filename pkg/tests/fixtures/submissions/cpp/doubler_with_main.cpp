#include <iostream>

int doubler(int x) {
    return 2 * x;
}

int main() {
    std::cout << doubler(7) << "\n";
    return 0;
}
