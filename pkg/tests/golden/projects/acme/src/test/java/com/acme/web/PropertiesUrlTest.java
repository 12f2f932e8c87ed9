package com.acme.web;

import java.net.URL;

import org.junit.Assert;
import org.junit.Before;
import org.junit.Test;

public class PropertiesUrlTest {
    private final int port = 8080;
    private URL propertiesUrl1;
    private URL propertiesUrl2;

    @Before
    public void setUp() throws Exception {
        this.propertiesUrl1 = new URL("http://localhost:" + port + "/properties/1");
        this.propertiesUrl2 = new URL("http://localhost:" + port + "/properties/2");
    }

    @Test
    public void urlsDiffer() {
        Assert.assertNotEquals(propertiesUrl1.getPath(), propertiesUrl2.getPath());
    }
}
