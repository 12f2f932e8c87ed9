package com.acme.http;

public interface HttpHeaders {
    String get(String name);

    boolean contains(String name);
}
