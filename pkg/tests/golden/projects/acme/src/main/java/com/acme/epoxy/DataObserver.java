package com.acme.epoxy;

public class DataObserver {
    private int operations;

    public void onChanged(int ops) {
        operations += ops;
    }

    public int getOperations() {
        return operations;
    }
}
