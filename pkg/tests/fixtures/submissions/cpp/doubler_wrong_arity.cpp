int doubler(int a, int b) {
    return a + b;
}
