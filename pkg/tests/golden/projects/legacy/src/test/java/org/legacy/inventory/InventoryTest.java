package org.legacy.inventory;

import static org.testng.Assert.assertEquals;
import static org.testng.Assert.assertFalse;

import org.testng.annotations.AfterClass;
import org.testng.annotations.BeforeMethod;
import org.testng.annotations.Test;

public class InventoryTest {
    private Inventory inventory;

    @BeforeMethod
    public void freshInventory() {
        inventory = new Inventory();
        inventory.add("apple", 3);
    }

    @AfterClass
    public void report() {
        inventory = null;
    }

    @Test
    public void addAccumulates() {
        inventory.add("apple", 2);
        assertEquals(inventory.count("apple"), 5);
    }

    @Test(expectedExceptions = IllegalStateException.class)
    public void removeUnknown() {
        assertFalse(inventory.remove("pear"));
        throw new IllegalStateException();
    }
}
