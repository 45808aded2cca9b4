int doubler(int x) {
    return 2 * x;
}

double doubler(double x) {
    return 2.0 * x;
}
